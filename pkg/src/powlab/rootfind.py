"""Bracketed scalar root finding (Brent's method).

Inverse-quadratic/secant steps with a bisection safeguard, plus a combined
stopping rule: the iteration ends when either the bracket is tighter than
``xtol + rtol*|x|`` or the residual drops below ``ftol``. The residual rule
lets callers enforce function-value contracts (e.g. market-clearing error
relative to total supply) instead of only x-precision.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable

_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class RootResult:
    root: float
    f_root: float
    iterations: int
    converged: bool
    bracket: tuple[float, float]


def brent(
    f: Callable[[float], float],
    a: float,
    b: float,
    fa: float | None = None,
    fb: float | None = None,
    *,
    rtol: float = 1e-12,
    xtol: float = 0.0,
    ftol: float = 0.0,
    max_iter: int = 200,
) -> RootResult:
    """Find a root of ``f`` in the bracket [a, b].

    ``fa``/``fb`` may be supplied to reuse endpoint evaluations. The bracket
    must straddle a sign change; a ValueError is raised otherwise.
    """
    if fa is None:
        fa = f(a)
    if fb is None:
        fb = f(b)
    if fa == 0.0:
        return RootResult(a, fa, 0, True, (a, a))
    if fb == 0.0:
        return RootResult(b, fb, 0, True, (b, b))
    if (fa > 0.0) == (fb > 0.0):
        raise ValueError(f"bracket [{a!r}, {b!r}] does not straddle a root "
                         f"(f(a)={fa!r}, f(b)={fb!r})")

    c, fc = a, fa
    d = e = b - a
    for iteration in range(1, max_iter + 1):
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * (xtol + rtol * abs(b))
        xm = 0.5 * (c - b)
        if fb == 0.0 or abs(fb) <= ftol or abs(xm) <= tol1:
            lo, hi = (b, c) if b <= c else (c, b)
            return RootResult(b, fb, iteration - 1, True, (lo, hi))
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        if abs(d) > tol1:
            b += d
        else:
            b += math.copysign(tol1, xm)
        fb = f(b)

    lo, hi = (b, c) if b <= c else (c, b)
    return RootResult(b, fb, max_iter, False, (lo, hi))
