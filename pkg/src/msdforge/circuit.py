"""The 15-to-1 distillation circuit: rotation set, stage pairing, and the
executable fault-tolerance checks for rotation errors and logical-X memory
errors.

The circuit applies 15 pi/8 rotations in Z-type bases to five logical qubits,
then post-selects on X measurements of the four validation qubits.  The
rotations are executed pairwise through eight lattice-surgery stages (with one
identity placeholder filling the sixteenth slot).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .paulis import OUT_ONLY, QubitId, ZPauliMask, product_mask

IDENTITY = ZPauliMask.identity()

# Canonical stage pairing.  Constraints honoured (stage index k = 1..8):
#   - stages 1-2 hold the four single-qubit rotations (A,C), (B,D);
#   - stages 1-4 never involve the output qubit;
#   - stages 5-6 hold four rotations from two of the three disjoint
#     output-pair groupings, so an X error on the output right after stage 6
#     is detectable;
#   - Z_OCD enters as a first (P) member, never a second (Q) member;
#   - no stage pairs two rotations from the forbidden classes that break the
#     ancillary region when d_Z > 2*d_m + 2.
_DEFAULT_STAGES = (
    ("A", "C"),
    ("B", "D"),
    ("ABC", "ACD"),
    ("BCD", "ABD"),
    ("OCD", "OAB"),
    ("OAC", "OBD"),
    ("OBC", "OAD"),
    ("OABCD", "I"),
)


@dataclass(frozen=True)
class RotationConfig:
    """Ordered list of the 15 rotation bases (indices 1..15)."""

    masks: tuple[ZPauliMask, ...]

    def __post_init__(self):
        if len(self.masks) != 15:
            raise ValueError(f"expected 15 rotations, got {len(self.masks)}")
        if len(set(self.masks)) != 15:
            raise ValueError("rotation masks must be distinct")
        by_weight = {w: sum(1 for m in self.masks if m.weight == w) for w in (1, 3, 5)}
        out_triples = sum(
            1 for m in self.masks if m.weight == 3 and m.involves_output()
        )
        if (
            by_weight.get(1) != 4
            or by_weight.get(3) != 10
            or by_weight.get(5) != 1
            or out_triples != 6
        ):
            raise ValueError(
                "rotation set must hold 4 singles, 4 validation triples, "
                "6 output pairs, and the weight-5 rotation"
            )

    def mask(self, n: int) -> ZPauliMask:
        """Rotation basis for 1-based index n."""
        if not 1 <= n <= 15:
            raise ValueError(f"rotation index must be in 1..15, got {n}")
        return self.masks[n - 1]


@dataclass(frozen=True)
class StageSchedule:
    """Eight ordered (P, Q) pairs; exactly one slot is the identity placeholder."""

    stages: tuple[tuple[ZPauliMask, ZPauliMask], ...]

    def __post_init__(self):
        if len(self.stages) != 8:
            raise ValueError(f"expected 8 stages, got {len(self.stages)}")
        flat = [m for pq in self.stages for m in pq]
        if sum(1 for m in flat if m.is_identity) != 1:
            raise ValueError("schedule must hold exactly one identity placeholder")
        nontrivial = [m for m in flat if not m.is_identity]
        if len(set(nontrivial)) != 15:
            raise ValueError("schedule must hold the 15 distinct rotations")

    def p(self, k: int) -> ZPauliMask:
        return self.stages[k - 1][0]

    def q(self, k: int) -> ZPauliMask:
        return self.stages[k - 1][1]

    def rotations(self) -> tuple[ZPauliMask, ...]:
        """The 15 rotations in execution order (placeholder dropped)."""
        return tuple(m for pq in self.stages for m in pq if not m.is_identity)

    def rotation_config(self) -> RotationConfig:
        return RotationConfig(self.rotations())

    def stage_support(self, k: int) -> ZPauliMask:
        """Union of supports of P^(k) and Q^(k) as a mask."""
        return ZPauliMask(self.p(k).bits | self.q(k).bits)

    def first_output_stage(self) -> int:
        """Stage at which the output qubit is first involved (it is prepared
        immediately before this stage)."""
        for k in range(1, 9):
            if self.stage_support(k).involves_output():
                return k
        raise ValueError("no stage involves the output qubit")

    def to_labels(self) -> list[list[str]]:
        return [[str(p), str(q)] for p, q in self.stages]

    @classmethod
    def from_labels(cls, pairs: Sequence[Sequence[str]]) -> "StageSchedule":
        return cls(
            tuple((ZPauliMask.parse(p), ZPauliMask.parse(q)) for p, q in pairs)
        )


def default_stage_schedule() -> StageSchedule:
    return StageSchedule.from_labels(_DEFAULT_STAGES)


def default_rotation_set() -> RotationConfig:
    return default_stage_schedule().rotation_config()


def x_error_rotations(
    config: RotationConfig, q: QubitId, n: int
) -> frozenset[ZPauliMask]:
    """Rotation bases picked up by commuting an X error on qubit ``q``
    (occurring right after rotation ``n``) to the start of the circuit.

    These are the bases P^(j) with j <= n whose support contains q; the error
    is equivalent to correlated -pi/4 rotation errors in exactly these bases.
    """
    if not q.is_distillation:
        raise ValueError(f"X-error location must be a distillation qubit, got {q}")
    if not 1 <= n <= 15:
        raise ValueError(f"rotation index must be in 1..15, got {n}")
    return frozenset(m for m in config.masks[:n] if m.contains(q))


def correlated_error_harmful(masks: Iterable[ZPauliMask]) -> bool:
    """Whether correlated +-pi/4 rotation errors in the given bases can damage
    the output state without being detected.

    Brute force over all subsets: the error is harmful iff some subset has odd
    multiplicity on the output qubit and even multiplicity on every validation
    qubit, i.e. its XOR-product is exactly Z on the output.
    """
    mask_list = list(masks)
    n = len(mask_list)
    for sel in range(1, 1 << n):
        bits = 0
        idx = sel
        i = 0
        while idx:
            if idx & 1:
                bits ^= mask_list[i].bits
            idx >>= 1
            i += 1
        if bits == OUT_ONLY.bits:
            return True
    return False


def count_undetectable_triples(config: RotationConfig) -> int:
    """Number of rotation triples whose pi/2-error product acts as Z on the
    output qubit alone (hence escapes all validation measurements)."""
    return sum(
        1
        for trio in combinations(config.masks, 3)
        if product_mask(trio) == OUT_ONLY
    )


# ---------------------------------------------------------------------------
# Rotation-pairing fault tolerance (distance-preservation oracle)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairingViolation:
    item: str  # "parity", "layout-precondition", "i", "ii", "iii"
    stage: int | None
    detail: str

    def to_dict(self) -> dict:
        return {"item": self.item, "stage": self.stage, "detail": self.detail}


def check_distance_parity(d_out: int, d_x: int, d_z: int, d_m: int) -> None:
    """Raise ValueError unless the distances have the required parities and
    every patch is non-degenerate."""
    if min(d_out, d_x, d_z, d_m) <= 0:
        raise ValueError("distances must be positive")
    if d_out % 2 == 0 or d_m % 2 == 0:
        raise ValueError(f"d_out and d_m must be odd, got ({d_out}, {d_m})")
    if d_x % 2 or d_z % 2:
        raise ValueError(f"d_x and d_z must be even, got ({d_x}, {d_z})")
    if d_out < 3 or d_m < 3:
        raise ValueError(
            f"triangular patches need distance >= 3, got ({d_out}, {d_m})"
        )


def _forbidden_pair_reason(p: ZPauliMask, q: ZPauliMask) -> str | None:
    """Pair classes that create short undetectable strings across the
    ancillary region when d_Z > 2*d_m + 2.

    A pair is bad when the two rotations agree on the output qubit and on one
    rectangular patch while differing on the other rectangular patch; the
    joint measurement then condenses the 'wrong' boson next to that patch.
    Both orders are forbidden.  On the 15-rotation set this catches the six
    output-pair combinations plus the validation-triple pairings (ABC, ABD)
    and (ACD, BCD).
    """
    ab = ZPauliMask.of(QubitId.A, QubitId.B).bits
    cd = ZPauliMask.of(QubitId.C, QubitId.D).bits
    o = OUT_ONLY.bits
    same_out = (p.bits & o) == (q.bits & o)
    same_ab = (p.bits & ab) == (q.bits & ab)
    same_cd = (p.bits & cd) == (q.bits & cd)
    if same_out and same_cd and not same_ab:
        return "equal output/CD parts with differing AB parts"
    if same_out and same_ab and not same_cd:
        return "equal output/AB parts with differing CD parts"
    return None


def verify_pairing(
    schedule: StageSchedule, d_out: int, d_x: int, d_z: int, d_m: int
) -> list[PairingViolation]:
    """Check the rotation pairing and distances against the three
    distance-preservation conditions.  Empty result means the layout stays
    distance-preserving through every stage.

    All violations are reported (no early exit) so sweep tooling can show
    complete diagnostics.
    """
    check_distance_parity(d_out, d_x, d_z, d_m)
    violations: list[PairingViolation] = []

    if d_z >= d_out or d_m >= d_out:
        violations.append(
            PairingViolation(
                "layout-precondition",
                None,
                f"layout assumes d_m, d_Z < d_out; got d_m={d_m}, d_Z={d_z}, "
                f"d_out={d_out}",
            )
        )
    if d_out - d_z > d_m:
        violations.append(
            PairingViolation(
                "i", None, f"d_out - d_Z = {d_out - d_z} exceeds d_m = {d_m}"
            )
        )
    if d_m >= 2 * d_z:
        violations.append(
            PairingViolation("i", None, f"d_m = {d_m} is not below 2*d_Z = {2 * d_z}")
        )

    ocd = ZPauliMask.parse("OCD")
    for k in range(1, 9):
        if schedule.q(k) == ocd:
            violations.append(
                PairingViolation(
                    "ii", k, "Z_OCD must be measured as a first (P) member"
                )
            )

    if d_z > 2 * d_m + 2:
        for k in range(3, 9):
            reason = _forbidden_pair_reason(schedule.p(k), schedule.q(k))
            if reason is not None:
                violations.append(
                    PairingViolation(
                        "iii",
                        k,
                        f"({schedule.p(k)}, {schedule.q(k)}) paired while "
                        f"d_Z > 2*d_m + 2: {reason}",
                    )
                )
    return violations
