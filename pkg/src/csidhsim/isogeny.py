"""Odd-degree isogeny computation (the xISOG control-unit model).

Kernel multiples are produced by a differential addition chain holding a
two-entry sliding window; each multiple is consumed immediately into four
running products: the per-point evaluation accumulators and the curve
products pi_plus = prod(X_i + Z_i), pi_minus = prod(X_i - Z_i).

The codomain coefficient comes from the Edwards-style update
(A24plus', A24minus') = ((A+2)^l * pi_plus^8, (A-2)^l * pi_minus^8)
mapped back to (Ax' : Az') = (2*(A24plus' + A24minus') : A24plus' - A24minus').
This is the reconciled form of the published update (whose printed version
misplaces a square); it is locked against the brute-force Velu oracle over
the toy field by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .fp import Fp
from .mont_curve import (CurveConstants, ProjCurve, ProjPoint, curve_constants,
                         is_infinity, xadd, xdbl, xmul)
from .trace import MOD_XISOG


@dataclass
class IsogenyAccumulators:
    """Running products over the d = (l-1)/2 kernel multiples."""
    pi_plus: int
    pi_minus: int
    eval_plus: list       # one accumulator per evaluated point
    eval_minus: list


def kernel_multiples(fp: Fp, K: ProjPoint, d: int,
                     const: CurveConstants) -> Iterator[ProjPoint]:
    """Yield x([i]K) for i = 1..d, keeping only the last two multiples."""
    if d < 1:
        return
    yield K
    if d == 1:
        return
    prev2, prev = K, xdbl(fp, K, const)
    yield prev
    for _ in range(d - 2):
        prev2, prev = prev, xadd(fp, prev, K, prev2)
        yield prev


def _pow_public(fp: Fp, x: int, e: int) -> int:
    """Fixed square-and-always-multiply schedule keyed to the public e."""
    bits = tuple((e >> i) & 1 for i in reversed(range(e.bit_length())))
    return fp.pow_fixed(x, bits)


def _eighth_power(fp: Fp, x: int) -> int:
    x = fp.mul(x, x)
    x = fp.mul(x, x)
    return fp.mul(x, x)


def xisog(fp: Fp, curve: ProjCurve, points, K: ProjPoint, l: int,
          fault_check: bool = True):
    """Degree-l isogeny with kernel <K>: codomain curve, point images, fault.

    `points` is a sequence of ProjPoint to push through the isogeny; a point
    in <K> maps to the point at infinity.  When fault_check is set, [l]K is
    computed at the end and any result other than the point at infinity
    raises the fault flag (never silently).

    Returns (curve', images, fault).
    """
    d = (l - 1) // 2
    const = curve_constants(fp, curve)

    fp.set_module(MOD_XISOG)
    one = fp.one
    pre = []
    for P in points:
        pre.append((fp.add(P.X, P.Z), fp.sub(P.X, P.Z)))
    acc = IsogenyAccumulators(one, one, [one] * len(pre), [one] * len(pre))

    for M in kernel_multiples(fp, K, d, const):
        fp.set_module(MOD_XISOG)
        s = fp.add(M.X, M.Z)
        t = fp.sub(M.X, M.Z)
        acc.pi_plus = fp.mul(acc.pi_plus, s)
        acc.pi_minus = fp.mul(acc.pi_minus, t)
        for j, (pp, pm) in enumerate(pre):
            t0 = fp.mul(pm, s)
            t1 = fp.mul(pp, t)
            acc.eval_plus[j] = fp.mul(acc.eval_plus[j], fp.add(t0, t1))
            acc.eval_minus[j] = fp.mul(acc.eval_minus[j], fp.sub(t0, t1))

    fp.set_module(MOD_XISOG)
    images = []
    for j, P in enumerate(points):
        ep = acc.eval_plus[j]
        em = acc.eval_minus[j]
        images.append(ProjPoint(fp.mul(P.X, fp.mul(ep, ep)),
                                fp.mul(P.Z, fp.mul(em, em))))

    az2 = fp.add(curve.Az, curve.Az)
    a24p = fp.add(curve.Ax, az2)                  # (A+2) projectively
    a24m = fp.sub(curve.Ax, az2)                  # (A-2) projectively
    tp = fp.mul(_pow_public(fp, a24p, l), _eighth_power(fp, acc.pi_plus))
    tm = fp.mul(_pow_public(fp, a24m, l), _eighth_power(fp, acc.pi_minus))
    ax = fp.add(fp.add(tp, tm), fp.add(tp, tm))   # 2*(tp + tm)
    az = fp.sub(tp, tm)
    new_curve = ProjCurve(ax, az)

    fault = False
    if fault_check:
        lk = xmul(fp, K, l, const, bound_bits=l.bit_length())
        fault = not is_infinity(lk)
    return new_curve, images, fault
