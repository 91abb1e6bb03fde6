"""Special-function kernel: log-gamma, digamma, chi-square tails, Chernoff solver.

Everything here is pure and stateless.  The digamma and regularized
incomplete-gamma routines are implemented in-repo (the stdlib has neither);
log-gamma delegates to ``math.lgamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

#: Euler-Mascheroni constant, gamma = -psi(1).
EULER_GAMMA = 0.5772156649015328606065120900824024310422

_GAMMQ_EPS = 1e-15
_GAMMQ_ITMAX = 500


@dataclass(frozen=True)
class ChernoffSolution:
    """Optimal Chernoff parameter for the geometric-mean fading tail.

    ``v_delta`` solves digamma(1 - v) = -(delta + gamma) on (0, 1) and
    ``exponent`` is the per-dimension rate v*psi(1-v) + lnGamma(1-v) <= 0.
    """

    delta: float
    v_delta: float
    exponent: float


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    if x <= 0.0:
        raise ValueError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function for x > 0.

    Upward recurrence to x >= 6, then the asymptotic Bernoulli series.
    Absolute error is well below 1e-10 on [0.05, 50].
    """
    if x <= 0.0:
        raise ValueError(f"digamma requires x > 0, got {x}")
    result = 0.0
    while x < 6.0:
        result -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    # B_{2k}/(2k) coefficients through x^{-14}
    series = inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (
        1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (
            1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))))
    return result + math.log(x) - 0.5 * inv - series


def _gamma_p_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by power series (x < a+1)."""
    if x == 0.0:
        return 0.0
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_GAMMQ_ITMAX):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _GAMMQ_EPS:
            break
    else:
        raise RuntimeError("incomplete gamma series did not converge")
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))

def _gamma_q_cf(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by continued fraction (x >= a+1)."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMQ_ITMAX):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMQ_EPS:
            break
    else:
        raise RuntimeError("incomplete gamma continued fraction did not converge")
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def chi_square_tail(dof: int, threshold: float) -> float:
    """P{Z >= threshold} for Z ~ chi-square with ``dof`` degrees of freedom.

    Series for small thresholds, continued fraction for large; both routes
    deliver uniform relative accuracy down to the underflow floor.
    """
    if dof < 1:
        raise ValueError(f"chi_square_tail requires dof >= 1, got {dof}")
    if threshold < 0.0:
        raise ValueError(f"chi_square_tail requires threshold >= 0, got {threshold}")
    a = 0.5 * dof
    x = 0.5 * threshold
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_p_series(a, x)
    return _gamma_q_cf(a, x)


def chernoff_solve(delta: float) -> ChernoffSolution:
    """Solve digamma(1 - v) = -(delta + gamma) for the optimal v on (0, 1).

    psi(1 - v) is strictly decreasing in v, so bisection on
    (1e-12, 1 - 1e-9) is guaranteed to bracket the root.
    """
    if delta <= 0.0:
        raise ValueError(f"chernoff_solve requires delta > 0, got {delta}")
    target = -(delta + EULER_GAMMA)

    def f(v: float) -> float:
        return digamma(1.0 - v) - target

    lo, hi = 1e-12, 1.0 - 1e-9
    flo = f(lo)
    fhi = f(hi)
    if flo <= 0.0 or fhi >= 0.0:
        raise RuntimeError(f"chernoff_solve: root not bracketed for delta={delta}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    v = 0.5 * (lo + hi)
    residual = abs(digamma(1.0 - v) + delta + EULER_GAMMA)
    if residual > 1e-9:
        raise RuntimeError(
            f"chernoff_solve: residual {residual:.3e} > 1e-9 for delta={delta}")
    exponent = v * digamma(1.0 - v) + ln_gamma(1.0 - v)
    return ChernoffSolution(delta=delta, v_delta=v, exponent=exponent)
