"""Logical qubit labels and Z-type Pauli products on the five distillation qubits.

The distillation circuit acts on one output qubit and four validation qubits
(A-D).  Every rotation basis, noise-channel unitary, and detectability argument
in this package is a product of logical Z operators over these five qubits, so
we represent such products as 5-bit masks.  The two surgery ancillas (alpha,
beta) never appear in rotation bases; they exist only as labels for channel
bookkeeping.
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator


class QubitId(Enum):
    OUT = "O"
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    ALPHA = "alpha"
    BETA = "beta"

    @property
    def is_validation(self) -> bool:
        return self in (QubitId.A, QubitId.B, QubitId.C, QubitId.D)

    @property
    def is_distillation(self) -> bool:
        return self is QubitId.OUT or self.is_validation

    @property
    def bit(self) -> int:
        if not self.is_distillation:
            raise ValueError(f"{self} carries no mask bit (surgery ancilla)")
        return _BITS[self]


_BIT_ORDER = (QubitId.OUT, QubitId.A, QubitId.B, QubitId.C, QubitId.D)
_BITS = {q: 1 << (4 - i) for i, q in enumerate(_BIT_ORDER)}  # OUT is the MSB


class ZPauliMask:
    """A product of logical Z operators over {OUT, A, B, C, D}, as a bitmask.

    Instances are immutable and interned, so identity comparison works and
    they are cheap to use as dict keys.  Multiplication of two Z products is
    XOR of masks (phases are irrelevant for diagonal operators under
    conjugation).
    """

    __slots__ = ("bits",)
    _cache: dict[int, "ZPauliMask"] = {}

    def __new__(cls, bits: int) -> "ZPauliMask":
        if not 0 <= bits < 32:
            raise ValueError(f"mask bits out of range: {bits}")
        inst = cls._cache.get(bits)
        if inst is None:
            inst = super().__new__(cls)
            object.__setattr__(inst, "bits", bits)
            cls._cache[bits] = inst
        return inst

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("ZPauliMask is immutable")

    @classmethod
    def identity(cls) -> "ZPauliMask":
        return cls(0)

    @classmethod
    def of(cls, *qubits: QubitId) -> "ZPauliMask":
        bits = 0
        for q in qubits:
            bits |= q.bit
        return cls(bits)

    @classmethod
    def parse(cls, text: str) -> "ZPauliMask":
        """Parse a label like "OAD", "ABC", "OABCD", or "I" (identity)."""
        s = text.strip().upper()
        if s in ("I", ""):
            return cls(0)
        bits = 0
        for ch in s:
            try:
                bits |= _BITS[QubitId(ch)]
            except (ValueError, KeyError):
                raise ValueError(f"unknown qubit label {ch!r} in {text!r}") from None
        return cls(bits)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    @property
    def is_identity(self) -> bool:
        return self.bits == 0

    def contains(self, q: QubitId) -> bool:
        return bool(self.bits & q.bit)

    def support(self) -> tuple[QubitId, ...]:
        return tuple(q for q in _BIT_ORDER if self.bits & _BITS[q])

    def involves_output(self) -> bool:
        return self.contains(QubitId.OUT)

    def __mul__(self, other: "ZPauliMask") -> "ZPauliMask":
        return ZPauliMask(self.bits ^ other.bits)

    def __iter__(self) -> Iterator[QubitId]:
        return iter(self.support())

    def __hash__(self) -> int:
        return self.bits

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ZPauliMask) and other.bits == self.bits

    def __repr__(self) -> str:
        return f"ZPauliMask({str(self)!r})"

    def __str__(self) -> str:
        if self.bits == 0:
            return "I"
        return "".join(q.value for q in self.support())


def product_mask(masks: Iterable[ZPauliMask]) -> ZPauliMask:
    """XOR-product of a collection of Z products (mod-2 multiplicity)."""
    bits = 0
    for m in masks:
        bits ^= m.bits
    return ZPauliMask(bits)


@lru_cache(maxsize=1)
def all_odd_weight_masks() -> tuple[ZPauliMask, ...]:
    """All 16 odd-weight Z products on the five qubits (enumeration helper)."""
    return tuple(ZPauliMask(b) for b in range(32) if (b.bit_count() % 2) == 1)


OUT_ONLY = ZPauliMask.of(QubitId.OUT)
