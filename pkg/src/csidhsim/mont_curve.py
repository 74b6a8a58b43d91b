"""x-only Montgomery-curve arithmetic over F_p.

Points are (X : Z) pairs and curves (Ax : Az) pairs of Montgomery-domain
ints; Z = 0 encodes the point at infinity.  All functions take an
:class:`~csidhsim.fp.Fp` context so operation traces attribute work to the
right control-unit module.

The combined double-and-add consumes the curve through precomputed
(A+2)/4-style constants (A24 = Ax + 2*Az, C24 = 4*Az), recomputed whenever
the curve changes.
"""

from __future__ import annotations

from enum import Enum
from typing import NamedTuple

from .fp import Fp
from .trace import MOD_XAFFINIZE, MOD_XDBLADD, MOD_XMUL, MOD_XTWIST


class InfinityAffinize(ZeroDivisionError):
    """Affinization of a projective value with zero denominator."""


class CurveSide(Enum):
    CURVE = "curve"
    TWIST = "twist"


class ProjPoint(NamedTuple):
    X: int
    Z: int


class ProjCurve(NamedTuple):
    Ax: int
    Az: int


class CurveConstants(NamedTuple):
    """Cached ladder constants: A24 = Ax + 2*Az, C24 = 4*Az."""
    A24: int
    C24: int


def curve_constants(fp: Fp, curve: ProjCurve) -> CurveConstants:
    fp.set_module(MOD_XDBLADD)
    az2 = fp.add(curve.Az, curve.Az)
    return CurveConstants(fp.add(curve.Ax, az2), fp.add(az2, az2))


def is_infinity(P: ProjPoint) -> bool:
    return P.Z == 0


def xdbl(fp: Fp, P: ProjPoint, const: CurveConstants) -> ProjPoint:
    """x([2]P)."""
    fp.set_module(MOD_XDBLADD)
    a = fp.add(P.X, P.Z)
    b = fp.sub(P.X, P.Z)
    aa = fp.mul(a, a)
    bb = fp.mul(b, b)
    e = fp.sub(aa, bb)
    t = fp.mul(const.C24, bb)
    x2 = fp.mul(t, aa)
    z2 = fp.mul(e, fp.add(t, fp.mul(const.A24, e)))
    return ProjPoint(x2, z2)


def xadd(fp: Fp, P: ProjPoint, Q: ProjPoint, diff: ProjPoint) -> ProjPoint:
    """x(P+Q) given diff = x(P-Q)."""
    fp.set_module(MOD_XDBLADD)
    a = fp.add(P.X, P.Z)
    b = fp.sub(P.X, P.Z)
    c = fp.add(Q.X, Q.Z)
    d = fp.sub(Q.X, Q.Z)
    da = fp.mul(d, a)
    cb = fp.mul(c, b)
    t0 = fp.add(da, cb)
    t1 = fp.sub(da, cb)
    x3 = fp.mul(diff.Z, fp.mul(t0, t0))
    z3 = fp.mul(diff.X, fp.mul(t1, t1))
    return ProjPoint(x3, z3)


def xdbladd(fp: Fp, P: ProjPoint, Q: ProjPoint, diff: ProjPoint,
            const: CurveConstants) -> tuple[ProjPoint, ProjPoint]:
    """Simultaneous (x([2]P), x(P+Q)) sharing the (X+-Z) intermediates.

    diff must be x(P-Q); the caller chooses its normalization.
    """
    fp.set_module(MOD_XDBLADD)
    a = fp.add(P.X, P.Z)
    b = fp.sub(P.X, P.Z)
    aa = fp.mul(a, a)
    bb = fp.mul(b, b)
    e = fp.sub(aa, bb)
    c = fp.add(Q.X, Q.Z)
    d = fp.sub(Q.X, Q.Z)
    da = fp.mul(d, a)
    cb = fp.mul(c, b)
    t0 = fp.add(da, cb)
    t1 = fp.sub(da, cb)
    x5 = fp.mul(diff.Z, fp.mul(t0, t0))
    z5 = fp.mul(diff.X, fp.mul(t1, t1))
    t = fp.mul(const.C24, bb)
    x4 = fp.mul(t, aa)
    z4 = fp.mul(e, fp.add(t, fp.mul(const.A24, e)))
    return ProjPoint(x4, z4), ProjPoint(x5, z5)


def xmul(fp: Fp, P: ProjPoint, k: int, const: CurveConstants,
         bound_bits: int | None = None) -> ProjPoint:
    """x([k]P) via a fixed-length Montgomery ladder.

    The ladder runs exactly `bound_bits` steps (default: bit length of k),
    so the operation sequence depends only on the supplied bound, not on
    the value of k.  P must not be the X = 0 two-torsion point (the usual
    x-only exclusion); the action layer never ladders it because sampling
    rejects x = 0 and cofactor clearing removes the even part.
    """
    fp.set_module(MOD_XMUL)
    if bound_bits is None:
        bound_bits = max(k.bit_length(), 1)
    if k >> bound_bits:
        raise ValueError("scalar exceeds the supplied bit-length bound")
    r0 = ProjPoint(fp.one, 0)          # point at infinity
    r1 = P
    for i in reversed(range(bound_bits)):
        if (k >> i) & 1:
            r1, r0 = xdbladd(fp, r1, r0, P, const)
        else:
            r0, r1 = xdbladd(fp, r0, r1, P, const)
    return r0


def xtwist(fp: Fp, x: int, A: int) -> CurveSide:
    """Classify an x-coordinate (Montgomery domain) as curve or twist.

    CURVE iff x^3 + A*x^2 + x is a square mod p; a zero right-hand side
    (2-torsion x) counts as CURVE.
    """
    fp.set_module(MOD_XTWIST)
    x2 = fp.mul(x, x)
    ax = fp.mul(A, x)
    rhs = fp.mul(x, fp.add(fp.add(x2, ax), fp.one))
    return CurveSide.CURVE if fp.is_square(rhs) else CurveSide.TWIST


def affinize(fp: Fp, curve: ProjCurve) -> int:
    """Affine standard-domain coefficient Ax/Az (single inversion)."""
    fp.set_module(MOD_XAFFINIZE)
    if curve.Az == 0:
        raise InfinityAffinize("projective curve with Az = 0")
    return fp.from_mont(fp.mul(curve.Ax, fp.inv(curve.Az)))


def affinize_pt(fp: Fp, P: ProjPoint) -> int:
    """Affine standard-domain x-coordinate X/Z."""
    fp.set_module(MOD_XAFFINIZE)
    if P.Z == 0:
        raise InfinityAffinize("point at infinity has no affine x")
    return fp.from_mont(fp.mul(P.X, fp.inv(P.Z)))
