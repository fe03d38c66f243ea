"""Independent closed-form oracles used by the tests.

Everything here is derived from textbook matching conditions with mpmath
high-precision arithmetic, deliberately NOT reusing any package code, so that
agreement is evidence and not tautology.
"""

import cmath
import math

import mpmath as mp

mp.mp.dps = 50


def _rect_amps_mp(L, V0, kk):
    """Full-precision amplitude pair (mpc, mpc) for the [0, L] barrier."""
    E = kk**2 / 2
    V = mp.mpf(V0)
    LL = mp.mpf(L)
    if abs(E - V) < mp.mpf("1e-30"):
        # linear interior: psi = alpha + beta (x - a)
        den = 1 + 1j * kk * LL / 2
        t0 = 1 / den
        r0 = (1j * kk * LL / 2) / den * mp.mpf(-1)
        # matching: den = 1 - i k L / 2 is for a well; redo directly
        # psi_in = alpha + beta x (x from 0); at 0: alpha = 1 + r, beta = ik(1 - r)
        # at L: alpha + beta L = t e^{ikL}(in local frame), beta = ik t e^{ikL}
        # solve: 1 + r + ik(1 - r) L = t', ik(1 - r) = ik t'  => t' = 1 - r
        # 1 + r + ik(1-r)L = 1 - r  =>  r(2 + ikL)= -ikL ... careful:
        # 1 + r + ikL - ikLr = 1 - r  ->  2r + ikL(1 - r) = 0 -> r = -ikL/(2 - ikL)
        r0 = -1j * kk * LL / (2 - 1j * kk * LL)
        t0 = (1 - r0) * mp.e ** (-1j * kk * LL)
    elif E < V:
        kap = mp.sqrt(2 * V - kk**2)
        den = mp.cosh(kap * LL) + 0.5j * (kap / kk - kk / kap) * mp.sinh(kap * LL)
        t0 = mp.e ** (-1j * kk * LL) / den
        r0 = -0.5j * (kap / kk + kk / kap) * mp.sinh(kap * LL) / den
    else:
        q = mp.sqrt(kk**2 - 2 * V)
        den = mp.cos(q * LL) - 0.5j * (kk / q + q / kk) * mp.sin(q * LL)
        t0 = mp.e ** (-1j * kk * LL) / den
        r0 = 0.5j * (q / kk - kk / q) * mp.sin(q * LL) / den
    return t0, r0


def rect_amplitudes(L, V0, k, a=0.0):
    """Transmitted/reflected amplitudes for a rectangular bump of height V0 on
    [a, a+L], unit incidence from the left, E = k^2/2.

    Returns (A_T, A_R) as python complex.  Handles tunneling (E < V0),
    overhead (E > V0) and the degenerate E = V0 case.
    """
    kk = mp.mpf(k)
    t0, r0 = _rect_amps_mp(L, V0, kk)
    # shift from [0, L] to [a, a+L]: A_T invariant, A_R picks up e^{2ika}
    shift = mp.e ** (2j * kk * mp.mpf(a))
    return complex(t0), complex(r0 * shift)


def rect_T(L, V0, k):
    t, _ = rect_amplitudes(L, V0, k)
    return abs(t) ** 2


def resonance_k(V0, L, n=1):
    """Wavenumber of the n-th transmission resonance of an overhead barrier."""
    return math.sqrt(2 * V0 + (n * math.pi / L) ** 2)


def rect_interior(L, V0, k, a=0.0):
    """Interior representation of the full state: (c1, c2, kappa_or_q, kind).

    kind "evan": psi(x) = c1 e^{kappa (x-a)} + c2 e^{-kappa (x-a)};
    kind "osc":  psi(x) = c1 e^{i q (x-a)} + c2 e^{-i q (x-a)}.
    """
    kk = mp.mpf(k)
    V = mp.mpf(V0)
    A_T, A_R = rect_amplitudes(L, V0, k, a)
    sh = mp.e ** (1j * kk * mp.mpf(a))
    p0 = sh + mp.mpc(A_R) / sh            # psi(a)
    dp0 = 1j * kk * (sh - mp.mpc(A_R) / sh)
    if kk**2 / 2 < V:
        kap = mp.sqrt(2 * V - kk**2)
        c1 = (p0 + dp0 / kap) / 2
        c2 = (p0 - dp0 / kap) / 2
        return c1, c2, kap, "evan"
    q = mp.sqrt(kk**2 - 2 * V)
    c1 = (p0 + dp0 / (1j * q)) / 2
    c2 = (p0 - dp0 / (1j * q)) / 2
    return c1, c2, q, "osc"


def rect_full_value(L, V0, k, x, a=0.0):
    """Full stationary state anywhere on the line (python complex)."""
    kk = mp.mpf(k)
    A_T, A_R = rect_amplitudes(L, V0, k, a)
    xm = mp.mpf(x)
    if x < a:
        return complex(mp.e ** (1j * kk * xm) + mp.mpc(A_R) * mp.e ** (-1j * kk * xm))
    if x >= a + L:
        return complex(mp.mpc(A_T) * mp.e ** (1j * kk * xm))
    c1, c2, w, kind = rect_interior(L, V0, k, a)
    if kind == "evan":
        return complex(c1 * mp.e ** (w * (xm - a)) + c2 * mp.e ** (-w * (xm - a)))
    return complex(c1 * mp.e ** (1j * w * (xm - a)) + c2 * mp.e ** (-1j * w * (xm - a)))


def rect_ref_state(L, V0, k, a=0.0):
    """Odd-branch reflection sub-state of a rectangular barrier.

    Returns (z, f) where z is the incident-share amplitude and f(x) evaluates
    the sub-state for x <= midpoint (beyond which the odd continuation is
    -f(2 x_c - x)).  Chooses the branch minimizing |psi(x_c)|.
    """
    kk = mp.mpf(k)
    V = mp.mpf(V0)
    LL = mp.mpf(L)
    A_T, A_R = rect_amplitudes(L, V0, k, a)
    T = abs(A_T) ** 2
    R = abs(A_R) ** 2
    s = mp.sqrt(mp.mpf(T) * mp.mpf(R))
    x_c = mp.mpf(a) + LL / 2
    evan = kk**2 / 2 < V
    w = mp.sqrt(2 * V - kk**2) if evan else mp.sqrt(kk**2 - 2 * V)
    wdiv = w if evan else 1j * w

    def interior_coeffs(z):
        ea = mp.e ** (1j * kk * mp.mpf(a))
        p0 = z * ea + mp.mpc(A_R) / ea
        dp0 = 1j * kk * (z * ea - mp.mpc(A_R) / ea)
        return (p0 + dp0 / wdiv) / 2, (p0 - dp0 / wdiv) / 2

    def mkeval(z, d1, d2):
        def f(x):
            xm = mp.mpf(x)
            if x < a:
                return complex(
                    z * mp.e ** (1j * kk * xm) + mp.mpc(A_R) * mp.e ** (-1j * kk * xm)
                )
            return complex(d1 * mp.e ** (wdiv * (xm - a)) + d2 * mp.e ** (-wdiv * (xm - a)))
        return f

    best = None
    for z in (mp.mpf(R) + 1j * s, mp.mpf(R) - 1j * s):
        d1, d2 = interior_coeffs(z)
        mid = abs(d1 * mp.e ** (wdiv * (x_c - a)) + d2 * mp.e ** (-wdiv * (x_c - a)))
        if best is None or mid < best[0]:
            best = (mid, z, mkeval(z, d1, d2))
    _, z_sel, f = best
    return complex(z_sel), f


def rect_masked_dwell_tr(L, V0, k, a=0.0, n=40001):
    """Riemann-sum dwell time of the masked transmission sub-state (mpmath)."""
    z, fref = rect_ref_state(L, V0, k, a)
    x_c = a + L / 2
    T = rect_T(L, V0, k)
    total = mp.mpf(0)
    h = mp.mpf(L) / (n - 1)
    for i in range(n):
        x = mp.mpf(a) + i * h
        fx = rect_full_value(L, V0, k, float(x), a)
        if x <= x_c:
            val = fx - fref(float(x))
        else:
            val = fx
        wgt = mp.mpf(1) if 0 < i < n - 1 else mp.mpf(0.5)
        total += wgt * abs(mp.mpc(val)) ** 2
    return float(total * h / (mp.mpf(k) * mp.mpf(T)))


def rect_phase_delay(L, V0, k):
    """d arg(A_T)/dE by high-precision differentiation (mpmath throughout)."""
    def phase(E):
        t, _ = _rect_amps_mp(L, V0, mp.sqrt(2 * E))
        return mp.arg(t)

    E0 = mp.mpf(k) ** 2 / 2
    h = mp.mpf("1e-10")
    # central difference at 50 digits: truncation ~ h^2, rounding negligible
    return float((phase(E0 + h) - phase(E0 - h)) / (2 * h))


def free_gaussian(x, t, x0, sigma, k0):
    """Free-space Gaussian packet, unit L2 norm, analytic evolution."""
    al = sigma**2 + 1j * t
    pref = (sigma**2 / math.pi) ** 0.25 / cmath.sqrt(al)
    ph = cmath.exp(
        1j * (k0 * (x - x0) - k0**2 * t / 2)
        - (x - x0 - k0 * t) ** 2 / (2 * al)
    )
    return pref * ph
