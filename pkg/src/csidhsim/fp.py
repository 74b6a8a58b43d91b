"""Field arithmetic over F_p in standard and Montgomery domains.

This module is the semantic ground truth for the word-level datapath model:
every datapath operation must produce bit-identical values to the functions
here.  Two surfaces are provided:

* pure functions over :class:`FieldElement` (the public API), and
* :class:`Fp`, a lean int-based context used by the curve/isogeny/action
  layers on their hot paths, with optional operation tracing.

All public operations return canonical values (< p).  No operation branches
on secret values: the conditional subtraction is a masked select and
inversion / residue tests run a fixed square-and-always-multiply schedule
keyed only to public exponents.
"""

from __future__ import annotations

from dataclasses import dataclass

from .params import CsidhParams
from .trace import (MOD_CSIDH, OP_ADD, OP_MONT_MUL, OP_MONT_REDUCE, OP_SUB)


class ZeroInverse(ZeroDivisionError):
    """Inverse of zero requested."""


@dataclass(frozen=True)
class FieldElement:
    """A mod-p value stored as n_words x 32-bit little-endian words.

    Whether the value is in the standard or Montgomery domain is determined
    by context; the representation is the same.
    """

    value: int
    params: CsidhParams

    def __post_init__(self):
        if not 0 <= self.value < self.params.p:
            raise ValueError("field element out of canonical range")

    @property
    def words(self) -> tuple[int, ...]:
        return int_to_words(self.value, self.params.n_words,
                            self.params.word_bits)

    @classmethod
    def from_words(cls, words, params: CsidhParams) -> "FieldElement":
        return cls(words_to_int(words, params.word_bits), params)

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(self.params.byte_length, "little")

    @classmethod
    def from_bytes(cls, raw: bytes, params: CsidhParams) -> "FieldElement":
        if len(raw) != params.byte_length:
            raise ValueError(f"expected {params.byte_length} bytes")
        return cls(int.from_bytes(raw, "little"), params)

    def hex(self) -> str:
        return self.to_bytes().hex()


@dataclass(frozen=True)
class WideProduct:
    """A 2W-bit integer (product of two canonical elements), < R^2."""

    value: int
    params: CsidhParams

    def __post_init__(self):
        if not 0 <= self.value < self.params.R ** 2:
            raise ValueError("wide product out of range")

    @property
    def words(self) -> tuple[int, ...]:
        return int_to_words(self.value, 2 * self.params.n_words,
                            self.params.word_bits)


def int_to_words(value: int, n_words: int, word_bits: int = 32):
    mask = (1 << word_bits) - 1
    return tuple((value >> (i * word_bits)) & mask for i in range(n_words))


def words_to_int(words, word_bits: int = 32) -> int:
    value = 0
    for i, w in enumerate(words):
        value |= w << (i * word_bits)
    return value


class Fp:
    """Int-valued field context with optional ALU-op tracing.

    The curve and action layers route all field arithmetic through one Fp
    instance; when a trace buffer is attached, each operation appends one
    opcode byte tagged with the currently active control-unit module.
    """

    __slots__ = ("params", "p", "mask", "shift", "pinv", "one", "R2",
                 "trace", "_mod", "_inv_bits", "_chi_bits")

    def __init__(self, params: CsidhParams, trace=None):
        self.params = params
        self.p = params.p
        self.mask = params.R - 1
        self.shift = params.width
        self.pinv = params.pinv
        self.one = params.one_m
        self.R2 = params.R2
        self.trace = trace.buf if trace is not None else None
        self._mod = MOD_CSIDH << 3
        e = params.p - 2
        self._inv_bits = tuple((e >> i) & 1
                               for i in reversed(range(e.bit_length())))
        e = (params.p - 1) >> 1
        self._chi_bits = tuple((e >> i) & 1
                               for i in reversed(range(e.bit_length())))

    def set_module(self, module_tag: int) -> None:
        self._mod = module_tag << 3

    # --- core ops (operands and results are plain ints < p) ---

    def add(self, a: int, b: int) -> int:
        t = self.trace
        if t is not None:
            t.append(self._mod | OP_ADD)
        s = a + b
        p = self.p
        return s - p if s >= p else s

    def sub(self, a: int, b: int) -> int:
        t = self.trace
        if t is not None:
            t.append(self._mod | OP_SUB)
        s = a - b
        return s + self.p if s < 0 else s

    def mul(self, a: int, b: int) -> int:
        """Montgomery product a*b*R^-1 mod p."""
        t = self.trace
        if t is not None:
            t.append(self._mod | OP_MONT_MUL)
        T = a * b
        m = ((T & self.mask) * self.pinv) & self.mask
        r = (T + m * self.p) >> self.shift
        p = self.p
        return r - p if r >= p else r

    def redc(self, T: int) -> int:
        """Montgomery reduction T*R^-1 mod p for T < p*R."""
        assert 0 <= T < self.p << self.shift, "mont_reduce precondition"
        t = self.trace
        if t is not None:
            t.append(self._mod | OP_MONT_REDUCE)
        m = ((T & self.mask) * self.pinv) & self.mask
        r = (T + m * self.p) >> self.shift
        p = self.p
        return r - p if r >= p else r

    def to_mont(self, a: int) -> int:
        return self.mul(a, self.R2)

    def from_mont(self, a: int) -> int:
        return self.redc(a)

    def pow_fixed(self, x: int, bits) -> int:
        """Montgomery-domain exponentiation with a fixed schedule.

        One squaring and one (always-executed) multiply per exponent bit, so
        the operation sequence depends only on the public exponent.
        """
        mul = self.mul
        r = self.one
        for b in bits:
            r = mul(r, r)
            t = mul(r, x)
            r = t if b else r
        return r

    def inv(self, a: int) -> int:
        """Montgomery-domain inverse: maps x*R to x^-1*R, via a^(p-2)."""
        if a == 0:
            raise ZeroInverse("inverse of zero")
        return self.pow_fixed(a, self._inv_bits)

    def is_square(self, a: int) -> bool:
        """Euler criterion with fixed schedule; 0 counts as a square.

        Works identically for standard- and Montgomery-domain inputs since
        R = 2^W is itself a square (W even).
        """
        r = self.pow_fixed(a, self._chi_bits)
        return r == self.one or a == 0


# --- FieldElement-level public operations ---

def _ctx(params: CsidhParams) -> Fp:
    # Per-params cached untraced context for the functional API.
    ctx = _CTX_CACHE.get(params.name)
    if ctx is None or ctx.params is not params:
        ctx = Fp(params)
        _CTX_CACHE[params.name] = ctx
    return ctx


_CTX_CACHE: dict[str, Fp] = {}


def fp_add(a: FieldElement, b: FieldElement, params: CsidhParams) -> FieldElement:
    return FieldElement(_ctx(params).add(a.value, b.value), params)


def fp_sub(a: FieldElement, b: FieldElement, params: CsidhParams) -> FieldElement:
    return FieldElement(_ctx(params).sub(a.value, b.value), params)


def mont_mul(a: FieldElement, b: FieldElement, params: CsidhParams) -> FieldElement:
    return FieldElement(_ctx(params).mul(a.value, b.value), params)


def mont_reduce(T: WideProduct, params: CsidhParams) -> FieldElement:
    return FieldElement(_ctx(params).redc(T.value), params)


def to_mont(a: FieldElement, params: CsidhParams) -> FieldElement:
    return FieldElement(_ctx(params).to_mont(a.value), params)


def from_mont(a: FieldElement, params: CsidhParams) -> FieldElement:
    return FieldElement(_ctx(params).from_mont(a.value), params)


def fp_inv(a: FieldElement, params: CsidhParams) -> FieldElement:
    """Modular inverse of the stored value (standard-domain convention)."""
    ctx = _ctx(params)
    return FieldElement(ctx.from_mont(ctx.inv(ctx.to_mont(a.value))), params)


def is_square(a: FieldElement, params: CsidhParams) -> bool:
    return _ctx(params).is_square(a.value)
