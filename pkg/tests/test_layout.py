import random

import pytest

from msdforge.circuit import StageSchedule, default_stage_schedule, verify_pairing
from msdforge.layout import (
    ALL_BOSONS,
    GX,
    GY,
    GZ,
    DistKind,
    condensed_set,
    dist_kind,
    enumerate_patch_requirements,
    enumerate_requirements,
    layout_distance_preserving,
    stage_condensed_sets,
    verify_layout,
)
from msdforge.paulis import ZPauliMask

# positions: 0 v40, 1 e0, 2 v01, 3 e1, 4 v12, 5 e2, 6 v23, 7 e3, 8 v34, 9 e4
POS = {name: i for i, name in enumerate(
    ["v40", "e0", "v01", "e1", "v12", "e2", "v23", "e3", "v34", "e4"]
)}


def test_condensed_set_cases():
    assert condensed_set(0, 0) == ALL_BOSONS
    assert condensed_set(0, 1) == GX       # only Q nontrivial
    assert condensed_set(1, 0) == GZ       # only P nontrivial
    assert condensed_set(0b10, 0b10) == GY  # equal nontrivial restrictions
    assert condensed_set(0b01, 0b10) == 0   # different nontrivial restrictions


def test_stage_condensed_sets_aux():
    sched = default_stage_schedule()
    for k in range(3, 9):
        csets = stage_condensed_sets(sched.p(k), sched.q(k))
        assert csets[1] == GZ  # alpha side only joins the first operator
        assert csets[4] == GX


def test_primed_distance_cases():
    assert dist_kind(POS["e0"], POS["v01"]) is DistKind.ZERO
    assert dist_kind(POS["e0"], POS["e1"]) is DistKind.ZERO
    assert dist_kind(POS["v01"], POS["e2"]) is DistKind.DM
    assert dist_kind(POS["e1"], POS["e3"]) is DistKind.DZ
    assert dist_kind(POS["e3"], POS["e0"]) is DistKind.DM
    assert dist_kind(POS["v40"], POS["e2"]) is DistKind.MAXDMDZ
    assert dist_kind(POS["v40"], POS["v23"]) is DistKind.MAXDMDZ
    assert dist_kind(POS["e0"], POS["v23"]) is DistKind.MAXDMDZ
    assert dist_kind(POS["v01"], POS["e4"]) is DistKind.LARGE
    assert dist_kind(POS["v01"], POS["v23"]) is DistKind.LARGE


# Known binding requirement lines, keyed by patch index, the clockwise
# endpoint pairs of segments 1..L-1, and the distance kinds.
KNOWN_REQUIREMENTS = [
    (0, [("v01", "e2")], [DistKind.DM]),
    (0, [("e1", "e3")], [DistKind.DZ]),
    (0, [("e2", "v40")], [DistKind.MAXDMDZ]),
    (0, [("e3", "v40")], [DistKind.DM]),
    (0, [("v01", "e2"), ("e3", "v40")], [DistKind.DM, DistKind.DM]),
    (0, [("e1", "v23"), ("v23", "e4")], [DistKind.DZ, DistKind.DZ]),
    (1, [("v12", "e3")], [DistKind.DZ]),
    (1, [("e2", "e4")], [DistKind.DZ]),
    (2, [("e3", "e0")], [DistKind.DM]),
    (2, [("e3", "e0"), ("e0", "v12")], [DistKind.DM, DistKind.DM]),
    (3, [("v34", "e0")], [DistKind.DM]),
    (3, [("e0", "e2")], [DistKind.DM]),
    (3, [("v34", "e0"), ("e0", "e2")], [DistKind.DM, DistKind.DM]),
    (4, [("e1", "e3")], [DistKind.DZ]),
    (4, [("e2", "v34")], [DistKind.DZ]),
    # extra lines that bind only outside condition (i)
    (0, [("v01", "e2"), ("e2", "e4")], [DistKind.DM, DistKind.DZ]),
    (1, [("v12", "v23"), ("v23", "e4")], [DistKind.DZ, DistKind.DZ]),
    (4, [("e1", "v23"), ("v23", "v34")], [DistKind.DZ, DistKind.DZ]),
]


@pytest.mark.parametrize("patch,segments,kinds", KNOWN_REQUIREMENTS)
def test_listed_requirements_enumerated(patch, segments, kinds):
    want = tuple((POS[a], POS[b]) for a, b in segments)
    for req in enumerate_patch_requirements(patch):
        if req.endpoints[1:] == want:
            assert list(req.sum_kinds) == kinds
            return
    raise AssertionError(f"requirement {segments} missing for patch {patch}")


def test_enumeration_finite_and_cached():
    sizes = [len(enumerate_patch_requirements(i)) for i in range(5)]
    assert all(0 < n < 500 for n in sizes)
    assert enumerate_patch_requirements(0) is enumerate_patch_requirements(0)


def test_verify_layout_default_admissible():
    assert verify_layout(default_stage_schedule(), 19, 8, 12, 7) == []


def test_verify_layout_rejects_ocd_as_q():
    labels = default_stage_schedule().to_labels()
    for pair in labels:
        if pair[0] == "OCD":
            pair[0], pair[1] = pair[1], pair[0]
    bad = StageSchedule.from_labels(labels)
    violations = verify_layout(bad, 19, 8, 12, 7)
    assert violations
    assert any(v.patch_index == 0 for v in violations)


def test_verify_layout_condition_i_boundary():
    sched = default_stage_schedule()
    # d_m = 2 d_z would break parity first; use d_m just above the window
    assert verify_layout(sched, 19, 8, 6, 11) != []
    assert not layout_distance_preserving(sched, 19, 8, 6, 11)


def test_no_measurement_no_requirements():
    # a schedule-like probe: all condensed sets full means nothing can fire
    csets = (ALL_BOSONS,) * 5
    for i in range(5):
        assert not any(r.applies(csets) for r in enumerate_patch_requirements(i))


def test_enumerate_requirements_active_for_schedule():
    sched = default_stage_schedule()
    active = enumerate_requirements(sched, 0)
    assert active  # the output patch always has live requirements
    for req in active:
        assert req.patch_index == 0


def test_layout_agrees_with_pairing_small_grid():
    sched = default_stage_schedule()
    for d_out in range(11, 26, 2):
        for d_z in range(6, 21, 2):
            for d_m in range(5, 20, 2):
                if d_z >= d_out or d_m >= d_out:
                    continue
                pairing_ok = not verify_pairing(sched, d_out, 8, d_z, d_m)
                layout_ok = layout_distance_preserving(sched, d_out, 8, d_z, d_m)
                assert pairing_ok == layout_ok, (d_out, d_z, d_m)


def test_violation_serialization():
    violations = verify_layout(default_stage_schedule(), 19, 8, 12, 5)
    assert violations
    d = violations[-1].to_dict()
    assert set(d) == {"stage", "patch_index", "endpoint_sequence", "required",
                      "available", "informational"}


def test_combined_prestage_informational():
    sched = default_stage_schedule()
    out = verify_layout(sched, 39, 22, 26, 13, combined_prestages=True)
    infos = [v for v in out if v.informational]
    assert len(infos) == 2  # stages 1 and 2 fall short of d_z
    assert all(v.available == 14 for v in infos)
    # fatal set unchanged
    assert [v for v in out if not v.informational] == []


# --- clockwise sufficiency oracle -------------------------------------------
#
# Brute-force enumeration over arbitrary (including non-clockwise) endpoint
# sequences, using the bidirectional existence condition.  Non-clockwise
# sequences must never impose a strictly stronger requirement than the
# clockwise ones, and the clockwise brute force must agree with the package
# enumerator.

from msdforge.layout import N_POS, primed_distance


def _cset_of(csets, pos):
    return ALL_BOSONS if pos % 2 == 0 else csets[(pos - 1) // 2]


def _gap_and(csets, a, b):
    """AND of condensed sets over edges strictly between a and b clockwise."""
    acc = ALL_BOSONS
    t = (a + 1) % N_POS
    while t != b % N_POS:
        if t % 2 == 1:
            acc &= csets[(t - 1) // 2]
        t = (t + 1) % N_POS
    return acc


def _exists_bidirectional(csets, pairs):
    """General CPGS existence over an arbitrary pair sequence (both gap
    directions allowed for connections and same-segment checks)."""
    feasible = ALL_BOSONS
    n = len(pairs)
    for j, (o, ot) in enumerate(pairs):
        feasible &= _cset_of(csets, o) & _cset_of(csets, ot)
        nxt = pairs[(j + 1) % n][0]
        if ot % N_POS != nxt % N_POS:
            feasible &= _gap_and(csets, ot, nxt) | _gap_and(csets, nxt, ot)
        same = _gap_and(csets, o, ot) | _gap_and(csets, ot, o)
        feasible &= ~same & ALL_BOSONS
        if not feasible:
            return False
    return bool(feasible)


def _trivially_adjacent(a, b):
    return dist_kind(a, b) is DistKind.ZERO


def _brute_min_requirement(csets, i, d_out, d_z, d_m, clockwise_only):
    o0 = (2 * (i - 1) + 2) % N_POS
    ot0 = (2 * i + 2) % N_POS
    objects = list(range(N_POS))
    best = None
    candidates = []
    for o1 in objects:
        for ot1 in objects:
            if o1 == ot1 or _trivially_adjacent(o1, ot1):
                continue
            candidates.append([(o1, ot1)])
    two_seg = [
        c + [(o2, ot2)]
        for c in candidates
        for o2 in objects
        for ot2 in objects
        if o2 != ot2 and not _trivially_adjacent(o2, ot2)
    ]
    for tail in candidates + two_seg:
        pairs = [(o0, ot0)] + tail
        if clockwise_only and not _is_clockwise(pairs):
            continue
        if _exists_bidirectional(csets, pairs):
            total = sum(
                primed_distance(a, b, d_out, d_z, d_m) for a, b in tail
            )
            best = total if best is None else min(best, total)
    return best


def _is_clockwise(pairs):
    # Unwrap positions from o_0; clockwise means the lifted sequence is
    # non-decreasing (strictly increasing inside each segment) within one
    # full turn of the pentagon.
    base = pairs[0][0]
    rels = []
    prev = 0
    for p in (q for pair in pairs for q in pair):
        rel = (p - base) % N_POS
        while rel < prev:
            rel += N_POS
        rels.append(rel)
        prev = rel
    if rels[-1] > N_POS:
        return False
    return all(rels[j] < rels[j + 1] for j in range(0, len(rels), 2))


def test_clockwise_sufficiency_on_random_profiles():
    rng = random.Random(11)
    d_out, d_z, d_m = 19, 12, 7
    for trial in range(25):
        csets = (
            rng.randrange(8),
            GZ,
            rng.randrange(8),
            rng.randrange(8),
            GX,
        )
        for i in range(5):
            any_min = _brute_min_requirement(
                csets, i, d_out, d_z, d_m, clockwise_only=False
            )
            cw_min = _brute_min_requirement(
                csets, i, d_out, d_z, d_m, clockwise_only=True
            )
            if any_min is None:
                assert cw_min is None
                continue
            assert cw_min is not None
            # non-clockwise sequences are never strictly stronger
            assert any_min >= cw_min


def test_brute_clockwise_agrees_with_enumerator():
    rng = random.Random(5)
    d_out, d_z, d_m = 19, 12, 7
    for trial in range(25):
        csets = (rng.randrange(8), GZ, rng.randrange(8), rng.randrange(8), GX)
        for i in range(5):
            cw_min = _brute_min_requirement(
                csets, i, d_out, d_z, d_m, clockwise_only=True
            )
            enum_min = None
            for req in enumerate_patch_requirements(i):
                if req.applies(csets):
                    total = req.required_sum(d_out, d_z, d_m)
                    enum_min = total if enum_min is None else min(enum_min, total)
            if cw_min is not None and cw_min <= d_out:
                assert enum_min == cw_min
            else:
                # enumerator prunes always-satisfied (large-sum) requirements
                assert enum_min is None or enum_min > d_out
