"""Spectral packet synthesis: normalization, free-space limit, conservation."""

import numpy as np
import pytest

import scatsplit as ss
from analytic import free_gaussian


# ---------------------------------------------------------------- spectrum


def test_spectrum_normalized(canonical_packet):
    assert abs(canonical_packet.norm_G - 1.0) < 1e-12


def test_kgrid_validation():
    with pytest.raises(ss.DomainError):
        ss.KGridSpec(-0.5, 2.0, 64)
    with pytest.raises(ss.DomainError):
        ss.KGridSpec(1.0, 1.0, 64)
    with pytest.raises(ss.DomainError):
        ss.KGridSpec(0.5, 2.0, 8)


def test_default_kgrid_clamped_floor():
    # k0 - 6.5/sigma < 0 here, so the lower edge clamps to a positive floor
    grid = ss.default_kgrid(0.7, 8.0)
    assert grid.k_min > 0
    pk = ss.make_gaussian_packet(-45.0, 8.0, 0.7, n=128)
    assert "k_grid_clamped" in pk.warnings
    assert abs(pk.norm_G - 1.0) < 1e-12  # renormalized despite the cut tail


def test_packet_preconditions():
    bar = ss.make_rectangular(0.0, 1.0, 2.0)
    with pytest.raises(ss.ConfigError):
        ss.make_gaussian_packet(-40.0, -1.0, 1.0)
    with pytest.raises(ss.ConfigError):
        ss.make_gaussian_packet(-40.0, 8.0, 0.0)
    with pytest.raises(ss.ConfigError):
        ss.make_gaussian_packet(-40.0, 2.0, 1.0)  # k0 < 5/sigma
    with pytest.raises(ss.ConfigError):
        ss.make_gaussian_packet(-10.0, 8.0, 1.0, barrier=bar)  # starts on top


def test_boundary_equalities_accepted():
    # both far-start inequalities admit exact equality
    bar = ss.make_rectangular(0.0, 1.0, 2.0)
    pk = ss.make_gaussian_packet(-40.0, 8.0, 0.625, barrier=bar, n=64)  # k0*sigma = 5
    assert pk.k0 == 0.625
    pk = ss.make_gaussian_packet(-40.0, 8.0, 1.0, barrier=bar, n=64)  # x0 + 5 sigma = a
    assert pk.x0 == -40.0


def test_narrow_grid_tail_rejected():
    grid = ss.KGridSpec(0.8, 1.2, 64)  # only +-1.6 sigma_k wide
    with pytest.raises(ss.GridRefinementError):
        ss.make_gaussian_packet(-40.0, 8.0, 1.0, grid=grid)


# ------------------------------------------------------------- free packet


def test_free_packet_matches_analytic():
    bar = ss.make_rectangular(0.0, 2.0, 0.0)
    pk = ss.make_gaussian_packet(-30.0, 6.0, 1.0, barrier=bar, n=384)
    for t in (0.0, 12.0):
        snap = ss.snapshot(pk, bar, t, dx=0.05)
        ref = np.array(
            [free_gaussian(x, t, -30.0, 6.0, 1.0) for x in snap.x_grid]
        )
        scale = np.max(np.abs(ref))
        assert np.max(np.abs(snap.psi_full - ref)) < 1e-7 * scale
        # nothing reflects off a zero barrier
        assert np.max(np.abs(snap.psi_ref)) < 1e-13
        assert abs(snap.T_t - 1.0) < 1e-9
        assert abs(snap.R_t) < 1e-15


# ------------------------------------------------------------ conservation


def test_snapshot_partition_and_identity(canonical_packet, canonical_barrier):
    snap = ss.snapshot(canonical_packet, canonical_barrier, 20.0, dx=0.05)
    # tr is the exact complement; T_t closes the norm identity by construction
    np.testing.assert_array_equal(snap.psi_tr, snap.psi_full - snap.psi_ref)
    assert snap.T_t == snap.norm_full - snap.R_t - 2 * snap.overlap_re


def test_quiet_time_conservation(canonical_packet, canonical_barrier):
    for t in ss.quiet_times(canonical_packet, canonical_barrier, n_pre=2, n_post=2):
        snap = ss.snapshot(canonical_packet, canonical_barrier, float(t), dx=0.05)
        norm, T_t, R_t, ov = ss.norms_and_overlap(snap, strict=True, tol=1e-6)
        assert abs(norm - 1.0) < 1e-9
        assert abs(T_t + R_t - 1.0) < 1e-8
        assert abs(ov) < 1e-8


def test_transient_overlap_and_constant_R(canonical_packet, canonical_barrier):
    t_pre, t_post = ss.event_window(canonical_packet, canonical_barrier)
    t_mid = 0.5 * (t_pre + t_post)
    mid = ss.snapshot(canonical_packet, canonical_barrier, t_mid, dx=0.05)
    late = ss.snapshot(canonical_packet, canonical_barrier, t_post + 10.0, dx=0.05)
    early = ss.snapshot(canonical_packet, canonical_barrier, 0.0, dx=0.05)

    # the cross term is genuinely nonzero while the packet straddles the
    # barrier and collapses again afterwards
    assert abs(mid.overlap_re) > 1e-5
    assert abs(late.overlap_re) < 1e-9
    # the masked reflection norm never changes (no flux through its node)
    assert abs(mid.R_t - early.R_t) < 1e-7
    assert abs(late.R_t - early.R_t) < 1e-10
    # total norm is conserved even mid-event
    assert abs(mid.norm_full - 1.0) < 1e-7


def test_event_window_brackets_transit(canonical_packet, canonical_barrier):
    t_pre, t_post = ss.event_window(canonical_packet, canonical_barrier)
    t_transit = (canonical_barrier.x_c - canonical_packet.x0) / canonical_packet.k0
    assert 0.0 < t_pre < t_transit < t_post


def test_spectral_T_matches_late_T_t(canonical_packet, canonical_barrier):
    T_bar = ss.spectral_transmitted_norm(canonical_packet, canonical_barrier)
    _, t_post = ss.event_window(canonical_packet, canonical_barrier)
    late = ss.snapshot(canonical_packet, canonical_barrier, t_post + 10.0, dx=0.05)
    assert abs(late.T_t - T_bar) < 1e-6
    assert abs(late.R_t - (1.0 - T_bar)) < 1e-6


# ----------------------------------------------------------------- guards


def test_snapshot_grid_checks(canonical_packet, canonical_barrier):
    with pytest.raises(ss.DomainError):
        ss.snapshot(canonical_packet, canonical_barrier, 0.0, xs=np.array([0.0]))
    with pytest.raises(ss.DomainError):
        ss.snapshot(
            canonical_packet, canonical_barrier, 0.0,
            xs=np.array([0.0, 1.0, 3.0]),
        )
    with pytest.raises(ss.WindowError):
        # uniform but far too short: it cuts straight through the packet
        ss.snapshot(
            canonical_packet, canonical_barrier, 0.0,
            xs=np.linspace(-42.0, -38.0, 81),
        )


def test_synthesize_component_names(canonical_packet, canonical_barrier):
    with pytest.raises(ss.DomainError):
        ss.synthesize(canonical_packet, canonical_barrier, "transmitted", 0.0,
                      np.array([0.0]))


def test_check_kgrid(canonical_packet, canonical_barrier):
    drift = ss.check_kgrid(canonical_packet, canonical_barrier, 40.0, dx=0.05)
    assert drift < 1e-6
    coarse = ss.make_gaussian_packet(-40.0, 8.0, 1.0, barrier=canonical_barrier,
                                     n=64)
    with pytest.raises(ss.GridRefinementError):
        ss.check_kgrid(coarse, canonical_barrier, 40.0, dx=0.05)
