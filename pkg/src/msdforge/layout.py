"""Macroscopic fault-tolerance verification of the distillation layout.

The ancillary region is schematized as a pentagon whose five edges adjoin the
five logical patches (output, alpha, AB, CD, beta, clockwise) and whose five
vertices are the green boundary segments between neighbouring domain walls.
A stage measurement is fault-tolerant iff every trivial cyclic product of
green string segments ("cyclic piecewise green string" operators) that could
shorten a logical representative has total segment weight at least the code
distance of the threatened patch.

Requirements are enumerated once per patch index as symbolic data (existence
predicate over condensed-boson sets + a distance sum), then evaluated per
stage and per distance tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import Sequence

from .circuit import StageSchedule, check_distance_parity
from .paulis import QubitId, ZPauliMask

# Green-boson labels as a 3-bit set: gx | gy | gz.
GX, GY, GZ = 1, 2, 4
ALL_BOSONS = GX | GY | GZ

# Pentagon positions, clockwise.  Even positions are vertices, odd are edges:
#   0: v40   1: e0(out)   2: v01   3: e1(alpha)   4: v12
#   5: e2(AB)   6: v23   7: e3(CD)   8: v34   9: e4(beta)
N_POS = 10
EDGE_PATCHES = ("out", "alpha", "AB", "CD", "beta")


def object_name(pos: int) -> str:
    pos %= N_POS
    if pos % 2 == 1:
        return f"e{(pos - 1) // 2}"
    i = ((pos - 2) // 2) % 5
    return f"v{i}{(i + 1) % 5}"


def _vertex_pos(i: int) -> int:
    """Position of v_{i,i+1}."""
    return (2 * i + 2) % N_POS

def _edge_pos(i: int) -> int:
    return 2 * i + 1


class DistKind(IntEnum):
    ZERO = 0
    DM = 1      # d_m + 1
    DZ = 2      # d_z
    MAXDMDZ = 3  # max(d_m + 1, d_z)
    LARGE = 4   # >= d_out + 1, satisfies any requirement


_MAX_PAIRS = {
    frozenset({0, 5}),  # v40, e2
    frozenset({0, 6}),  # v40, v23
    frozenset({1, 6}),  # e0, v23
}


def _jump_sets(j: int) -> tuple[set[int], set[int]]:
    """Object positions on the two sides of edge j (one-patch jumps)."""
    side_a = {_vertex_pos(j - 1), _edge_pos((j - 1) % 5)}
    side_b = {_vertex_pos(j), _edge_pos((j + 1) % 5)}
    return side_a, side_b


@lru_cache(maxsize=None)
def dist_kind(pos1: int, pos2: int) -> DistKind:
    """Classify the primed distance between two pentagon objects."""
    a, b = pos1 % N_POS, pos2 % N_POS
    if a == b:
        return DistKind.ZERO
    delta = (b - a) % N_POS
    # Edge with one of its endpoints, or neighbouring edges: zero after
    # moving endpoints.
    if delta in (1, N_POS - 1):
        return DistKind.ZERO
    if a % 2 == 1 and b % 2 == 1 and delta in (2, N_POS - 2):
        return DistKind.ZERO
    for j, kind in ((1, DistKind.DM), (4, DistKind.DM),
                    (2, DistKind.DZ), (3, DistKind.DZ)):
        sa, sb = _jump_sets(j)
        if (a in sa and b in sb) or (b in sa and a in sb):
            return kind
    if frozenset({a, b}) in _MAX_PAIRS:
        return DistKind.MAXDMDZ
    return DistKind.LARGE


def primed_distance(pos1: int, pos2: int, d_out: int, d_z: int, d_m: int) -> int:
    kind = dist_kind(pos1, pos2)
    if kind is DistKind.ZERO:
        return 0
    if kind is DistKind.DM:
        return d_m + 1
    if kind is DistKind.DZ:
        return d_z
    if kind is DistKind.MAXDMDZ:
        return max(d_m + 1, d_z)
    return d_out + 1


# ---------------------------------------------------------------------------
# Condensed-boson sets
# ---------------------------------------------------------------------------

_PATCH_QUBITS: tuple[tuple[QubitId, ...], ...] = (
    (QubitId.OUT,),
    (),  # alpha: handled explicitly
    (QubitId.A, QubitId.B),
    (QubitId.C, QubitId.D),
    (),  # beta
)


def condensed_set(p_bits: int, q_bits: int) -> int:
    """Bosons condensed by a domain-wall edge, from the restrictions of the
    two measured operators on that patch (each as a bitmask over the patch's
    logical qubits; 0 means identity)."""
    if p_bits == 0 and q_bits == 0:
        return ALL_BOSONS
    if p_bits == 0:
        return GX
    if q_bits == 0:
        return GZ
    if p_bits == q_bits:
        return GY
    return 0


def stage_condensed_sets(p: ZPauliMask, q: ZPauliMask) -> tuple[int, int, int, int, int]:
    """Per-edge condensed sets for a regular stage measuring (P (x) Z_alpha,
    Q (x) Z_beta)."""
    def restrict(mask: ZPauliMask, qubits: tuple[QubitId, ...]) -> int:
        bits = 0
        for idx, qb in enumerate(qubits):
            if mask.contains(qb):
                bits |= 1 << idx
        return bits

    c = []
    for i, qubits in enumerate(_PATCH_QUBITS):
        if i == 1:
            c.append(GZ)  # alpha joins P only
        elif i == 4:
            c.append(GX)  # beta joins Q only
        else:
            c.append(condensed_set(restrict(p, qubits), restrict(q, qubits)))
    return tuple(c)  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Requirement enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Requirement:
    """One CPGS-derived requirement for patch ``patch_index``.

    ``endpoints`` is the full clockwise object sequence (positions, starting
    with the bounded segment).  The requirement applies whenever the
    existence predicate holds for the stage's condensed sets, and is then
    satisfied iff the summed primed distances of segments 1..L-1 reach the
    patch's code distance.
    """

    patch_index: int
    endpoints: tuple[tuple[int, int], ...]  # (o_j, o~_j) positions, j = 0..L-1
    lhs_edges: tuple[int, ...]        # edge indices appearing as endpoints
    lhs_between: tuple[tuple[int, ...], ...]  # connection index sets
    rhs_between: tuple[tuple[int, ...], ...]  # same-segment index sets
    sum_kinds: tuple[DistKind, ...]   # distance kinds of segments 1..L-1

    def applies(self, csets: Sequence[int]) -> bool:
        lhs = ALL_BOSONS
        for e in self.lhs_edges:
            lhs &= csets[e]
        for group in self.lhs_between:
            for e in group:
                lhs &= csets[e]
        if not lhs:
            return False
        rhs = 0
        for group in self.rhs_between:
            acc = ALL_BOSONS  # empty index set condenses all three bosons
            for e in group:
                acc &= csets[e]
            rhs |= acc
        return bool(lhs & ~rhs)

    def required_sum(self, d_out: int, d_z: int, d_m: int) -> int:
        return sum(_kind_value(k, d_out, d_z, d_m) for k in self.sum_kinds)

    def describe(self) -> str:
        seq = " ".join(
            f"({object_name(a)},{object_name(b)})" for a, b in self.endpoints
        )
        return f"patch {self.patch_index} [{EDGE_PATCHES[self.patch_index]}]: {seq}"


def _kind_value(kind: DistKind, d_out: int, d_z: int, d_m: int) -> int:
    if kind is DistKind.DM:
        return d_m + 1
    if kind is DistKind.DZ:
        return d_z
    if kind is DistKind.MAXDMDZ:
        return max(d_m + 1, d_z)
    if kind is DistKind.LARGE:
        return d_out + 1
    return 0


MAX_SEGMENTS = 5  # the pentagon has five vertices; longer cycles revisit


@lru_cache(maxsize=None)
def enumerate_patch_requirements(i: int) -> tuple[Requirement, ...]:
    """All potentially-binding CPGS requirements protecting patch ``i``.

    Sequences are enumerated clockwise in unwrapped positions with the fixed
    first segment (v_{i-1,i}, v_{i,i+1}); requirements whose distance sum
    contains an always-sufficient (LARGE) term are pruned, as are exact
    duplicates.
    """
    if not 0 <= i <= 4:
        raise ValueError(f"patch index must be in 0..4, got {i}")
    base = _vertex_pos(i - 1)  # o_0, unwrapped origin
    first_pair = (0, 2)  # o_0 -> v_{i-1,i}, o~_0 -> v_{i,i+1} in rotated coords

    requirements: list[Requirement] = []
    seen: set[tuple] = set()

    def pair_banned(a: int, b: int) -> bool:
        return dist_kind((a + base) % N_POS, (b + base) % N_POS) is DistKind.ZERO

    def extend(pairs: list[tuple[int, int]], cursor: int) -> None:
        # Close the cycle: connect the last segment back to o_0 at position 10.
        if len(pairs) >= 2:
            key = tuple(pairs)
            if key not in seen:
                seen.add(key)
                req = _build_requirement(i, base, pairs)
                if req is not None:
                    requirements.append(req)
        if len(pairs) >= MAX_SEGMENTS:
            return
        for a in range(cursor, N_POS):
            for b in range(a + 1, N_POS + 1):
                if b - a >= N_POS:
                    continue
                if pair_banned(a, b):
                    continue
                pairs.append((a, b))
                extend(pairs, b)
                pairs.pop()

    extend([first_pair], first_pair[1])
    return tuple(requirements)


def _build_requirement(
    i: int, base: int, pairs: list[tuple[int, int]]
) -> Requirement | None:
    kinds = []
    for a, b in pairs[1:]:
        kind = dist_kind((a + base) % N_POS, (b + base) % N_POS)
        if kind is DistKind.LARGE:
            return None  # always satisfied, never binding
        kinds.append(kind)

    lhs_edges = []
    for a, b in pairs:
        for t in (a, b):
            if (t + base) % 2 == 1:
                lhs_edges.append((((t + base) % N_POS) - 1) // 2)
    lhs_between = []
    rhs_between = []
    for j, (a, b) in enumerate(pairs):
        nxt = pairs[j + 1][0] if j + 1 < len(pairs) else N_POS
        lhs_between.append(_edges_between_abs(b, nxt, base))
        rhs_between.append(_edges_between_abs(a, b, base))

    endpoints = tuple(((a + base) % N_POS, (b + base) % N_POS) for a, b in pairs)
    return Requirement(
        patch_index=i,
        endpoints=endpoints,
        lhs_edges=tuple(lhs_edges),
        lhs_between=tuple(lhs_between),
        rhs_between=tuple(rhs_between),
        sum_kinds=tuple(kinds),
    )


def _edges_between_abs(a: int, b: int, base: int) -> tuple[int, ...]:
    out = []
    for t in range(a + 1, b):
        if (t + base) % 2 == 1:
            out.append((((t + base) % N_POS) - 1) // 2)
    return tuple(out)


def enumerate_requirements(
    schedule: StageSchedule, i: int
) -> list[Requirement]:
    """Requirements for patch ``i`` that are active in at least one regular
    stage (k >= 3) of the schedule."""
    active = []
    for req in enumerate_patch_requirements(i):
        for k in range(3, 9):
            csets = stage_condensed_sets(schedule.p(k), schedule.q(k))
            if req.applies(csets):
                active.append(req)
                break
    return active


# ---------------------------------------------------------------------------
# Layout verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LayoutViolation:
    stage: int
    patch_index: int
    endpoint_sequence: tuple[str, ...]
    required: int
    available: int
    informational: bool = False

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "patch_index": self.patch_index,
            "endpoint_sequence": list(self.endpoint_sequence),
            "required": self.required,
            "available": self.available,
            "informational": self.informational,
        }


def _patch_distance(i: int, d_out: int, d_z: int, d_m: int) -> int:
    return (d_out, d_m, d_z, d_z, d_m)[i]


@lru_cache(maxsize=4096)
def _fired_requirements(csets: tuple[int, ...]) -> tuple[tuple[Requirement, int], ...]:
    """Requirements whose existence predicate holds for the given per-edge
    condensed sets; depends only on the measured operator pair, so it is
    shared across distance tuples."""
    fired = []
    for i in range(5):
        for req in enumerate_patch_requirements(i):
            if req.applies(csets):
                fired.append((req, i))
    return tuple(fired)


@lru_cache(maxsize=4096)
def _fired_sum_shapes(csets: tuple[int, ...]) -> tuple[tuple[int, int, int, int], ...]:
    """Deduplicated (patch, #dm-terms, #dz-terms, #max-terms) shapes of the
    fired requirements, enough to decide distance preservation."""
    shapes = set()
    for req, i in _fired_requirements(csets):
        n_dm = sum(1 for k in req.sum_kinds if k is DistKind.DM)
        n_dz = sum(1 for k in req.sum_kinds if k is DistKind.DZ)
        n_mx = sum(1 for k in req.sum_kinds if k is DistKind.MAXDMDZ)
        shapes.add((i, n_dm, n_dz, n_mx))
    return tuple(sorted(shapes))


@lru_cache(maxsize=65536)
def _csets_for_bits(p_bits: int, q_bits: int) -> tuple[int, int, int, int, int]:
    return stage_condensed_sets(ZPauliMask(p_bits), ZPauliMask(q_bits))


def layout_distance_preserving(
    schedule: StageSchedule, d_out: int, d_x: int, d_z: int, d_m: int
) -> bool:
    """Fast accept/reject form of :func:`verify_layout` (no diagnostics)."""
    check_distance_parity(d_out, d_x, d_z, d_m)
    if d_z >= d_out or d_m >= d_out:
        return False
    dists = (d_out, d_m, d_z, d_z, d_m)
    for k in range(3, 9):
        csets = _csets_for_bits(schedule.p(k).bits, schedule.q(k).bits)
        for i, n_dm, n_dz, n_mx in _fired_sum_shapes(csets):
            total = (
                n_dm * (d_m + 1) + n_dz * d_z + n_mx * max(d_m + 1, d_z)
            )
            if total < dists[i]:
                return False
    return True


def verify_layout(
    schedule: StageSchedule,
    d_out: int,
    d_x: int,
    d_z: int,
    d_m: int,
    combined_prestages: bool = False,
) -> list[LayoutViolation]:
    """Exhaustively evaluate the CPGS requirements for stages 3..8.

    Returns every violated requirement; an empty list means the layout is
    distance-preserving for this schedule and distance tuple.  With
    ``combined_prestages`` the cultivation-MSD stages 1-2 (which reuse the
    full layout) are additionally reported as informational findings when the
    region falls short of d_z there.
    """
    check_distance_parity(d_out, d_x, d_z, d_m)
    violations: list[LayoutViolation] = []

    if d_z >= d_out or d_m >= d_out:
        violations.append(
            LayoutViolation(
                stage=0,
                patch_index=0,
                endpoint_sequence=("layout-precondition",),
                required=d_out,
                available=max(d_z, d_m),
            )
        )

    for k in range(3, 9):
        csets = stage_condensed_sets(schedule.p(k), schedule.q(k))
        for req, i in _fired_requirements(csets):
            required = _patch_distance(i, d_out, d_z, d_m)
            available = sum(
                _kind_value(kind, d_out, d_z, d_m) for kind in req.sum_kinds
            )
            if available < required:
                violations.append(
                    LayoutViolation(
                        stage=k,
                        patch_index=i,
                        endpoint_sequence=tuple(
                            f"({object_name(a)},{object_name(b)})"
                            for a, b in req.endpoints
                        ),
                        required=required,
                        available=available,
                    )
                )

    if combined_prestages and d_m + 1 < d_z:
        for k in (1, 2):
            qubits = ("A", "C") if k == 1 else ("B", "D")
            violations.append(
                LayoutViolation(
                    stage=k,
                    patch_index=2 if k == 1 else 3,
                    endpoint_sequence=(
                        f"pre-stage strings of weight min(d_z, d_m+1) reach "
                        f"qubits {qubits[0]}/{qubits[1]}",
                    ),
                    required=d_z,
                    available=d_m + 1,
                    informational=True,
                )
            )
    return violations
