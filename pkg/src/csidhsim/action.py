"""The CSIDH class-group action and key exchange.

Two evaluation paths are provided:

* :func:`group_action_vartime` -- the straightforward batched algorithm:
  process positive exponents on the curve side, negative ones on the
  quadratic twist, retrying with fresh points until every exponent drains.
  Its control flow depends on the private key.

* :func:`group_action_ct` -- the constant-time variant.  Every prime
  receives exactly ``m`` isogeny slots; slots beyond ``|e_i|`` run a dummy
  isogeny whose results are discarded while the point is advanced by a
  degree-``l`` scalar multiplication instead.  Real and dummy slots issue
  the identical operation sequence, so the recorded OpTrace depends only on
  the parameter set, never on the key.

Randomness-dependent retry loops (side rejection when sampling points,
re-sampling when a kernel comes out trivial) are modeled as fixed-latency
units: they run against an untraced twin context and contribute exactly one
canonical traced attempt each.  Retry counts depend only on the sampled
randomness, so this keeps the trace structure-determined without hiding any
key-dependent work.

Negative exponents never negate the curve: a twist-side x-coordinate is a
perfectly good x-only kernel, and pushing it through the same isogeny
formulas walks the class-group action in the inverse direction.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass

from .fp import FieldElement, Fp
from .mont_curve import (CurveSide, ProjCurve, ProjPoint, curve_constants,
                         is_infinity, xmul, xtwist)
from .isogeny import xisog
from .params import PARAM_IDS, PARAM_NAMES, CsidhParams, get_params
from .trace import MOD_CSIDH, MOD_XAFFINIZE, OpTrace

SK_MAGIC = b"CSIDHSK1"
PK_MAGIC = b"CSIDHPK1"

# Retry ceiling for rejection loops; hitting it means the entropy source is
# broken (honest probability ~2^-1000), not that we were unlucky.
_MAX_REJECTS = 10_000


class RngFailure(RuntimeError):
    """The entropy source failed to produce an acceptable sample."""


class FaultDetected(RuntimeError):
    """An isogeny fault check tripped ([l]K was not the point at infinity)."""


class InvalidPeerKey(ValueError):
    """Peer public key failed validation."""


class Drbg:
    """Deterministic byte stream (SHA-256 in counter mode) with rejection
    samplers for words, bounded integers, and sign bits."""

    def __init__(self, seed: bytes):
        self._key = hashlib.sha256(seed).digest()
        self._counter = 0
        self._pool = b""

    def bytes(self, n: int) -> bytes:
        while len(self._pool) < n:
            block = hashlib.sha256(
                self._key + self._counter.to_bytes(8, "little")).digest()
            self._counter += 1
            self._pool += block
        out, self._pool = self._pool[:n], self._pool[n:]
        return out

    def word(self) -> int:
        return int.from_bytes(self.bytes(4), "little")

    def bit(self) -> int:
        return self.bytes(1)[0] & 1

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection."""
        nbytes = (bound.bit_length() + 7) // 8
        mask = (1 << bound.bit_length()) - 1
        for _ in range(_MAX_REJECTS):
            v = int.from_bytes(self.bytes(nbytes), "little") & mask
            if v < bound:
                return v
        raise RngFailure("rejection sampler exceeded retry ceiling")


def make_rng(seed: bytes | None = None) -> Drbg:
    return Drbg(seed if seed is not None else os.urandom(32))


@dataclass(frozen=True)
class PrivateKey:
    """Exponent vector e with |e_i| <= m."""

    exponents: tuple
    params: CsidhParams

    def __post_init__(self):
        if len(self.exponents) != self.params.n:
            raise ValueError("exponent vector has wrong length")
        if any(abs(e) > self.params.m for e in self.exponents):
            raise ValueError("exponent out of range")

    def to_bytes(self) -> bytes:
        body = bytes((e + 256) % 256 for e in self.exponents)
        return SK_MAGIC + bytes([PARAM_IDS[self.params.name]]) + body

    @classmethod
    def from_bytes(cls, raw: bytes) -> "PrivateKey":
        if raw[:8] != SK_MAGIC:
            raise ValueError("bad private-key magic")
        if raw[8] not in PARAM_NAMES:
            raise ValueError("unknown parameter-set id")
        params = get_params(PARAM_NAMES[raw[8]])
        body = raw[9:]
        if len(body) != params.n:
            raise ValueError("private-key payload has wrong length")
        exps = tuple(b - 256 if b >= 128 else b for b in body)
        return cls(exps, params)


@dataclass
class PublicKey:
    """Affine Montgomery coefficient (standard domain)."""

    A: int
    validated: bool = False

    def to_bytes(self, params: CsidhParams) -> bytes:
        return (PK_MAGIC + bytes([PARAM_IDS[params.name]])
                + self.A.to_bytes(params.byte_length, "little"))

    @classmethod
    def from_bytes(cls, raw: bytes) -> tuple["PublicKey", CsidhParams]:
        if raw[:8] != PK_MAGIC:
            raise ValueError("bad public-key magic")
        if raw[8] not in PARAM_NAMES:
            raise ValueError("unknown parameter-set id")
        params = get_params(PARAM_NAMES[raw[8]])
        body = raw[9:]
        if len(body) != params.byte_length:
            raise ValueError("public-key payload has wrong length")
        A = int.from_bytes(body, "little")
        if A >= params.p:
            raise ValueError("public-key coefficient out of range")
        return cls(A), params


@dataclass
class ActionConfig:
    constant_time: bool = True
    fault_check: bool = True
    batch_limit: int = 16
    rng_seed: bytes | None = None

    def __post_init__(self):
        if self.batch_limit < 1:
            raise ValueError("batch_limit must be >= 1")


def random_private_key(params: CsidhParams, rng: Drbg) -> PrivateKey:
    span = 2 * params.m + 1
    exps = tuple(rng.below(span) - params.m for _ in range(params.n))
    return PrivateKey(exps, params)


def validate_basic(A: int, params: CsidhParams) -> bool:
    """Canonical range plus nonsingularity (A not in {2, p-2})."""
    return 0 <= A < params.p and A != 2 and A != params.p - 2


# --- point sampling -------------------------------------------------------

def _affine_mont(fp: Fp, curve: ProjCurve) -> int:
    """Montgomery-domain affine coefficient Ax/Az (fixed-schedule inverse)."""
    fp.set_module(MOD_XAFFINIZE)
    return fp.mul(curve.Ax, fp.inv(curve.Az))


def sample_point(fp: Fp, A_mont: int, side: CurveSide, rng: Drbg,
                 shadow: Fp | None = None) -> ProjPoint:
    """Random projective point with x on the requested side of E_A.

    Rejection runs against the untraced `shadow` context when one is given;
    the accepted candidate is then re-classified once through `fp` so each
    sample contributes a fixed amount of traced work.
    """
    probe = shadow if shadow is not None else fp
    for _ in range(_MAX_REJECTS):
        x = rng.below(fp.p)
        if x == 0:
            continue
        xm = probe.to_mont(x)
        if xtwist(probe, xm, A_mont) is not side:
            continue
        if shadow is not None:
            xm = fp.to_mont(x)
            xtwist(fp, xm, A_mont)   # canonical traced classification
        return ProjPoint(xm, fp.one)
    raise RngFailure("point sampling exceeded retry ceiling")


# --- variable-time action (the reference batched algorithm) ---------------

def group_action_vartime(pk: PublicKey, sk: PrivateKey, params: CsidhParams,
                         rng: Drbg, config: ActionConfig | None = None,
                         trace: OpTrace | None = None):
    """Batched variable-time evaluation; returns (PublicKey, success)."""
    config = config or ActionConfig()
    fp = Fp(params, trace)
    if not validate_basic(pk.A, params):
        return PublicKey(rng.below(params.p)), False
    primes = params.primes
    n = params.n
    e = list(sk.exponents)
    curve = ProjCurve(fp.to_mont(pk.A), fp.one)

    for twist in (False, True):
        side = CurveSide.TWIST if twist else CurveSide.CURVE
        while True:
            batch = [i for i in range(n)
                     if (e[i] > 0 and not twist) or (e[i] < 0 and twist)]
            batch = batch[:config.batch_limit]
            if not batch:
                break
            in_batch = set(batch)
            k = 4 * math.prod(primes[j] for j in range(n)
                              if j not in in_batch)
            A_mont = _affine_mont(fp, curve)
            P = sample_point(fp, A_mont, side, rng)
            const = curve_constants(fp, curve)
            P = xmul(fp, P, k, const)
            for idx in reversed(batch):
                if is_infinity(P):
                    break
                cof = math.prod(primes[j] for j in batch if j < idx)
                K = xmul(fp, P, cof, const)
                if is_infinity(K):
                    continue   # P lacked this torsion; prime stays pending
                curve, images, fault = xisog(fp, curve, [P], K, primes[idx],
                                             config.fault_check)
                if fault:
                    return PublicKey(rng.below(params.p)), False
                P = images[0]
                const = curve_constants(fp, curve)
                e[idx] += 1 if twist else -1
            # next while-iteration draws a fresh point

    if not _validate_working_curve(fp, curve, params, rng):
        return PublicKey(rng.below(params.p)), False
    return PublicKey(_affinize_std(fp, curve)), True


def _affinize_std(fp: Fp, curve: ProjCurve) -> int:
    fp.set_module(MOD_XAFFINIZE)
    return fp.from_mont(fp.mul(curve.Ax, fp.inv(curve.Az)))


def _validate_working_curve(fp: Fp, curve: ProjCurve, params: CsidhParams,
                            rng: Drbg) -> bool:
    """Order sanity check on the projective working curve: [p+1]P = O for a
    random point (any side; both have order p+1 iff supersingular)."""
    fp.set_module(MOD_CSIDH)
    x = 0
    while x == 0:
        x = rng.below(params.p)
    P = ProjPoint(fp.to_mont(x), fp.one)
    const = curve_constants(fp, curve)
    Q = xmul(fp, P, params.p + 1, const,
             bound_bits=(params.p + 1).bit_length())
    return is_infinity(Q)


# --- constant-time action --------------------------------------------------

def group_action_ct(pk: PublicKey, sk: PrivateKey, params: CsidhParams,
                    rng: Drbg, config: ActionConfig | None = None):
    """Dummy-isogeny constant-time evaluation.

    Returns (PublicKey, success, OpTrace).  The trace is byte-identical
    across private keys of the same parameter set: every prime is processed
    in a fixed batch/round/slot schedule with exactly m isogeny computations,
    and each slot issues the same operations whether the isogeny is real or
    a dummy -- only which results are kept differs.
    """
    config = config or ActionConfig()
    trace = OpTrace()
    fp = Fp(params, trace)
    shadow = Fp(params)       # untraced twin for retry/repair loops
    if not validate_basic(pk.A, params):
        return PublicKey(rng.below(params.p)), False, trace

    primes = params.primes
    n = params.n
    m = params.m
    # Sign-match e_ct[i] = +-m; the sign bit is drawn for every index so rng
    # usage never depends on where the zeros sit.
    signs = []
    for ei in sk.exponents:
        coin = 1 if rng.bit() else -1
        signs.append(1 if ei > 0 else -1 if ei < 0 else coin)
    remaining = [abs(ei) for ei in sk.exponents]

    curve = ProjCurve(fp.to_mont(pk.A), fp.one)
    limit = config.batch_limit
    batches = [list(range(lo, min(lo + limit, n)))
               for lo in range(0, n, limit)]

    for batch in batches:
        in_batch = set(batch)
        k_clear = 4 * math.prod(primes[j] for j in range(n)
                                if j not in in_batch)
        for _ in range(m):
            curve = _ct_round(fp, shadow, curve, batch, k_clear, signs,
                              remaining, params, rng, config)
            if curve is None:
                return PublicKey(rng.below(params.p)), False, trace

    assert all(r == 0 for r in remaining)
    if not _validate_working_curve(fp, curve, params, rng):
        return PublicKey(rng.below(params.p)), False, trace
    return PublicKey(_affinize_std(fp, curve)), True, trace


def _sample_pair(fp: Fp, shadow: Fp | None, curve: ProjCurve, clear: int,
                 rng: Drbg):
    """One curve-side and one twist-side point, cofactor-cleared by [clear].

    All canonical work goes through `fp`; side rejection runs on `shadow`
    when one is given.  The repair path passes the untraced context as `fp`
    (and shadow=None) so nothing it does reaches the trace.
    """
    A_mont = _affine_mont(fp, curve)
    P_plus = sample_point(fp, A_mont, CurveSide.CURVE, rng, shadow=shadow)
    P_minus = sample_point(fp, A_mont, CurveSide.TWIST, rng, shadow=shadow)
    const = curve_constants(fp, curve)
    bound = clear.bit_length()
    P_plus = xmul(fp, P_plus, clear, const, bound_bits=bound)
    P_minus = xmul(fp, P_minus, clear, const, bound_bits=bound)
    return P_plus, P_minus, const


def _kernel_ok(shadow: Fp, P: ProjPoint, cof: int, l: int,
               const) -> bool:
    """Untraced pre-flight: [cof]P is a genuine order-l kernel."""
    K = xmul(shadow, P, cof, const)
    if is_infinity(K):
        return False
    return is_infinity(xmul(shadow, K, l, const))


def _ct_round(fp, shadow, curve, batch, k_clear, signs, remaining, params,
              rng, config):
    """One batch round: sample a point pair, then one slot per prime,
    descending.  Returns the updated curve, or None on a detected fault."""
    primes = params.primes
    P_plus, P_minus, const = _sample_pair(fp, shadow, curve, k_clear, rng)

    for idx in reversed(batch):
        l = primes[idx]
        cof = math.prod(primes[j] for j in batch if j < idx)
        s = signs[idx]
        active, other = (P_plus, P_minus) if s > 0 else (P_minus, P_plus)

        # Untraced repair loop: if the active point happens to lack the
        # l-torsion, re-sample the pair (restoring the torsion already
        # stripped by earlier slots of this round) until the kernel is good.
        while not _kernel_ok(shadow, active, cof, l, const):
            done = math.prod(primes[j] for j in batch
                             if j > idx)   # primes already processed
            P_plus, P_minus, _ = _sample_pair(
                shadow, None, curve, k_clear * done, rng)
            active, other = (P_plus, P_minus) if s > 0 else (P_minus, P_plus)

        real = remaining[idx] > 0
        K = xmul(fp, active, cof, const,
                 bound_bits=max(cof.bit_length(), 1))
        new_curve, images, fault = xisog(fp, curve, [active, other], K, l,
                                         config.fault_check)
        if fault:
            return None
        img_active, img_other = images

        # Identical traced work either way; the flag only selects which
        # results survive.
        next_curve = new_curve if real else curve
        next_const = curve_constants(fp, next_curve)
        in_active = img_active if real else active
        in_other = img_other if real else other
        la = xmul(fp, in_active, l, next_const, bound_bits=l.bit_length())
        lo = xmul(fp, in_other, l, next_const, bound_bits=l.bit_length())
        new_active = img_active if real else la
        new_other = lo
        if real:
            remaining[idx] -= 1

        curve, const = next_curve, next_const
        P_plus, P_minus = ((new_active, new_other) if s > 0
                           else (new_other, new_active))
    return curve


# --- key exchange ----------------------------------------------------------

def validate_pk(A: int, params: CsidhParams, rng: Drbg,
                rounds: int = 1) -> bool:
    """Supersingularity sanity check: encoding, A not in {2, p-2}, then
    [p+1]P = O for `rounds` random points.  Probabilistic, not a proof."""
    if not validate_basic(A, params):
        return False
    fp = Fp(params)
    curve = ProjCurve(fp.to_mont(A), fp.one)
    for _ in range(rounds):
        if not _validate_working_curve(fp, curve, params, rng):
            return False
    return True


def keygen(sk: PrivateKey, params: CsidhParams, rng: Drbg,
           config: ActionConfig | None = None):
    """Public key [sk]E_0; returns (PublicKey, OpTrace or None)."""
    config = config or ActionConfig()
    base = PublicKey(0)
    if config.constant_time:
        pk, ok, trace = group_action_ct(base, sk, params, rng, config)
    else:
        pk, ok = group_action_vartime(base, sk, params, rng, config)
        trace = None
    if not ok:
        raise FaultDetected("key generation failed its self-check")
    pk.validated = True
    return pk, trace


def shared_secret(sk: PrivateKey, peer: PublicKey, params: CsidhParams,
                  rng: Drbg, config: ActionConfig | None = None,
                  validate: bool = True) -> FieldElement:
    """Affine coefficient of [sk]E_peer."""
    config = config or ActionConfig()
    if validate and not peer.validated:
        if not validate_pk(peer.A, params, rng):
            raise InvalidPeerKey("peer public key failed validation")
        peer.validated = True
    elif not validate_basic(peer.A, params):
        raise InvalidPeerKey("peer public key is malformed")
    if config.constant_time:
        out, ok, _ = group_action_ct(peer, sk, params, rng, config)
    else:
        out, ok = group_action_vartime(peer, sk, params, rng, config)
    if not ok:
        raise FaultDetected("shared-secret derivation failed its self-check")
    return FieldElement(out.A, params)
