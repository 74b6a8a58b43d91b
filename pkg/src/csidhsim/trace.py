"""Operation tracing and cycle accounting.

Every ALU-level operation issued by the arithmetic and curve layers is
recorded as one byte: ``(module_tag << 3) | opcode``.  Traces are append-only
bytearrays, cheap to record and directly comparable byte-for-byte, which is
exactly the property the constant-time tests rely on.

A :class:`CycleLedger` prices a finished trace against a cost table
(opcode -> cycles per ALU mode) and reports totals per issuing module.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field

# Opcodes
OP_ADD = 0
OP_SUB = 1
OP_MUL_WIDE = 2
OP_MONT_MUL = 3
OP_MONT_REDUCE = 4

OPCODE_NAMES = {
    OP_ADD: "ADD",
    OP_SUB: "SUB",
    OP_MUL_WIDE: "MUL_WIDE",
    OP_MONT_MUL: "MONT_MUL",
    OP_MONT_REDUCE: "MONT_REDUCE",
}
OPCODE_IDS = {v: k for k, v in OPCODE_NAMES.items()}

# Issuing-module tags (the control-unit FSMs plus the top level)
MOD_XISOG = 0
MOD_XMUL = 1
MOD_XDBLADD = 2
MOD_XAFFINIZE = 3
MOD_XTWIST = 4
MOD_CSIDH = 5

MODULE_NAMES = {
    MOD_XISOG: "xISOG",
    MOD_XMUL: "xMUL",
    MOD_XDBLADD: "xDBLADD",
    MOD_XAFFINIZE: "xAffinize",
    MOD_XTWIST: "xTWIST",
    MOD_CSIDH: "CSIDH",
}
MODULE_IDS = {v: k for k, v in MODULE_NAMES.items()}


class OpTrace:
    """Append-only sequence of (opcode, issuing-module) entries."""

    __slots__ = ("buf",)

    def __init__(self):
        self.buf = bytearray()

    def __len__(self):
        return len(self.buf)

    def __eq__(self, other):
        if not isinstance(other, OpTrace):
            return NotImplemented
        return self.buf == other.buf

    def record(self, opcode: int, module_tag: int) -> None:
        self.buf.append((module_tag << 3) | opcode)

    def entries(self):
        for b in self.buf:
            yield OPCODE_NAMES[b & 7], MODULE_NAMES[b >> 3]

    def digest(self) -> str:
        return hashlib.sha256(self.buf).hexdigest()

    def dump(self, path) -> None:
        """Export as newline-delimited ``opcode<TAB>module`` text."""
        with open(path, "w") as f:
            for op, mod in self.entries():
                f.write(f"{op}\t{mod}\n")

    def dumps(self) -> bytes:
        return b"".join(
            f"{op}\t{mod}\n".encode() for op, mod in self.entries()
        )

    @classmethod
    def load(cls, path) -> "OpTrace":
        t = cls()
        with open(path) as f:
            for line in f:
                op, mod = line.rstrip("\n").split("\t")
                t.record(OPCODE_IDS[op], MODULE_IDS[mod])
        return t


def record(trace: OpTrace, opcode: int, module_tag: int) -> None:
    trace.record(opcode, module_tag)


def trace_equal(t1: OpTrace, t2: OpTrace) -> bool:
    """Exact sequence equality, module tags included."""
    return t1.buf == t2.buf


# Default cycle costs per opcode and ALU mode.  The 87-cycle Montgomery
# multiply and 22/23-cycle wide multiply are end-to-end hardware latencies;
# the modular add/sub default of 4 covers two carry-select passes (raw add
# plus conditional correction).  MONT_REDUCE is the reduction tail of the
# 87-cycle multiply (87 minus one wide multiply).
DEFAULT_COSTS = {
    "fpga": {
        OP_ADD: 4,
        OP_SUB: 4,
        OP_MUL_WIDE: 22,
        OP_MONT_MUL: 87,
        OP_MONT_REDUCE: 65,
    },
    "asic": {
        OP_ADD: 4,
        OP_SUB: 4,
        OP_MUL_WIDE: 23,
        OP_MONT_MUL: 89,
        OP_MONT_REDUCE: 66,
    },
}

# Per-operation control/FSM overhead in cycles (state transitions, memory
# moves).  Zero by default; calibrate_overhead() fits it to a measured or
# published end-to-end total.
DEFAULT_OVERHEAD = {"fpga": 0.0, "asic": 0.0}


@dataclass
class CostTable:
    costs: dict = field(default_factory=lambda: {
        mode: dict(ops) for mode, ops in DEFAULT_COSTS.items()})
    overhead: dict = field(default_factory=lambda: dict(DEFAULT_OVERHEAD))

    def cost(self, opcode: int, mode: str) -> int:
        return self.costs[mode][opcode]

    def dump(self, path) -> None:
        with open(path, "w") as f:
            for mode, ops in sorted(self.costs.items()):
                for op, cyc in sorted(ops.items()):
                    f.write(f"{OPCODE_NAMES[op]}.{mode} = {cyc}\n")
            for mode, ov in sorted(self.overhead.items()):
                f.write(f"overhead.{mode} = {ov}\n")

    @classmethod
    def load(cls, path) -> "CostTable":
        table = cls()
        with open(path) as f:
            for line in f:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, value = (s.strip() for s in line.split("="))
                name, mode = key.split(".")
                if name == "overhead":
                    table.overhead[mode] = float(value)
                else:
                    table.costs[mode][OPCODE_IDS[name]] = int(value)
        return table


class CycleLedger:
    """Per-opcode and per-module operation counts with cycle pricing."""

    def __init__(self, trace: OpTrace, cost_table: CostTable | None = None):
        self.cost_table = cost_table or CostTable()
        self._packed = Counter(trace.buf)

    @property
    def total_ops(self) -> int:
        return sum(self._packed.values())

    def opcode_counts(self) -> dict[str, int]:
        counts = Counter()
        for packed, n in self._packed.items():
            counts[OPCODE_NAMES[packed & 7]] += n
        return dict(counts)

    def module_cycles(self, mode: str) -> dict[str, int]:
        out = Counter()
        costs = self.cost_table.costs[mode]
        for packed, n in self._packed.items():
            out[MODULE_NAMES[packed >> 3]] += n * costs[packed & 7]
        return dict(out)

    def total_cycles(self, mode: str) -> int:
        costs = self.cost_table.costs[mode]
        base = sum(n * costs[packed & 7] for packed, n in self._packed.items())
        return base + round(self.cost_table.overhead[mode] * self.total_ops)

    def dump(self, path, mode: str) -> None:
        with open(path, "w") as f:
            for name, n in sorted(self.opcode_counts().items()):
                f.write(f"count.{name} = {n}\n")
            for name, cyc in sorted(self.module_cycles(mode).items()):
                f.write(f"cycles.{name} = {cyc}\n")
            f.write(f"overhead.{mode} = {self.cost_table.overhead[mode]}\n")
            f.write(f"total.{mode} = {self.total_cycles(mode)}\n")


def total_cycles(ledger: CycleLedger, mode: str) -> int:
    return ledger.total_cycles(mode)


def calibrate_overhead(ledger: CycleLedger, target_cycles: int,
                       mode: str) -> float:
    """Fit the per-operation overhead constant so the ledger total matches
    a published end-to-end cycle count."""
    base = CycleLedger.__new__(CycleLedger)
    base.cost_table = CostTable(costs=ledger.cost_table.costs,
                                overhead={m: 0.0 for m in DEFAULT_OVERHEAD})
    base._packed = ledger._packed
    raw = base.total_cycles(mode)
    return (target_cycles - raw) / ledger.total_ops


def estimate_keygen(params, config=None, mode: str = "fpga",
                    seed: bytes = b"cycle-estimate",
                    cost_table: CostTable | None = None):
    """Run one seeded constant-time keygen on the base curve and price it.

    Returns (total_cycles, per-module breakdown, ledger).
    """
    from . import action  # deferred: action imports this module

    cfg = config or action.ActionConfig()
    sk = action.random_private_key(params, action.make_rng(seed))
    _, _, trace = action.group_action_ct(
        action.PublicKey(0), sk, params, action.make_rng(seed), cfg)
    ledger = CycleLedger(trace, cost_table)
    return ledger.total_cycles(mode), ledger.module_cycles(mode), ledger
