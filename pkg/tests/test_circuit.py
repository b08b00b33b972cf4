import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msdforge.circuit import (
    PairingViolation,
    RotationConfig,
    StageSchedule,
    correlated_error_harmful,
    count_undetectable_triples,
    default_rotation_set,
    default_stage_schedule,
    verify_pairing,
    x_error_rotations,
)
from msdforge.paulis import QubitId, ZPauliMask

VALIDATION = (QubitId.A, QubitId.B, QubitId.C, QubitId.D)


def test_default_rotation_set_structure():
    cfg = default_rotation_set()
    assert len(cfg.masks) == 15
    assert len(set(cfg.masks)) == 15
    weights = sorted(m.weight for m in cfg.masks)
    assert weights == [1] * 4 + [3] * 10 + [5]
    assert cfg.mask(1) == ZPauliMask.parse("A")
    assert ZPauliMask.parse("OABCD") in cfg.masks
    out_triples = [m for m in cfg.masks if m.weight == 3 and m.involves_output()]
    assert len(out_triples) == 6


def test_default_schedule_structure():
    sched = default_stage_schedule()
    assert sched.p(1) == ZPauliMask.parse("A")
    assert sched.q(1) == ZPauliMask.parse("C")
    assert sched.p(2) == ZPauliMask.parse("B")
    assert sched.q(2) == ZPauliMask.parse("D")
    # rotations 1-8 (stages 1-4) never touch the output qubit
    for k in range(1, 5):
        assert not sched.stage_support(k).involves_output()
    # Z_OCD is measured as a P member
    assert ZPauliMask.parse("OCD") in [sched.p(k) for k in range(1, 9)]
    assert sched.first_output_stage() == 5


def test_schedule_label_roundtrip():
    sched = default_stage_schedule()
    again = StageSchedule.from_labels(sched.to_labels())
    assert again == sched


def test_x_error_rotations_examples():
    cfg = default_rotation_set()
    assert x_error_rotations(cfg, QubitId.A, 1) == {ZPauliMask.parse("A")}
    assert x_error_rotations(cfg, QubitId.OUT, 4) == frozenset()
    assert len(x_error_rotations(cfg, QubitId.B, 15)) == 8
    with pytest.raises(ValueError):
        x_error_rotations(cfg, QubitId.ALPHA, 3)
    with pytest.raises(ValueError):
        x_error_rotations(cfg, QubitId.A, 16)


def test_validation_x_errors_never_harmful():
    cfg = default_rotation_set()
    for q in VALIDATION:
        for n in range(1, 16):
            assert not correlated_error_harmful(x_error_rotations(cfg, q, n))


def test_output_x_errors_harmful_late():
    cfg = default_rotation_set()
    # after stage 6 (rotation 12) the design keeps output X errors detectable
    assert not correlated_error_harmful(x_error_rotations(cfg, QubitId.OUT, 12))
    # after stage 7 at least one location is harmful
    assert correlated_error_harmful(x_error_rotations(cfg, QubitId.OUT, 15))


def test_small_subsets_not_harmful():
    cfg = default_rotation_set()
    from itertools import combinations

    for pair in combinations(cfg.masks, 2):
        assert not correlated_error_harmful(pair)
    for single in cfg.masks:
        assert not correlated_error_harmful([single])


def test_some_triple_harmful():
    cfg = default_rotation_set()
    assert correlated_error_harmful([cfg.mask(5), cfg.mask(7), cfg.mask(14)])


def test_count_undetectable_triples():
    assert count_undetectable_triples(default_rotation_set()) == 35


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False))
def test_triple_count_permutation_invariant(rng):
    masks = list(default_rotation_set().masks)
    rng.shuffle(masks)
    assert count_undetectable_triples(RotationConfig(tuple(masks))) == 35


def test_rotation_config_rejects_duplicates():
    masks = [ZPauliMask.parse("A")] * 15
    with pytest.raises(ValueError):
        RotationConfig(tuple(masks))


def test_verify_pairing_admissible():
    assert verify_pairing(default_stage_schedule(), 19, 8, 12, 7) == []


def test_verify_pairing_condition_i():
    violations = verify_pairing(default_stage_schedule(), 19, 8, 12, 5)
    assert any(v.item == "i" for v in violations)


def test_verify_pairing_condition_ii():
    labels = default_stage_schedule().to_labels()
    for pair in labels:
        if pair[0] == "OCD":
            pair[0], pair[1] = pair[1], pair[0]
    bad = StageSchedule.from_labels(labels)
    violations = verify_pairing(bad, 19, 8, 12, 7)
    assert any(v.item == "ii" for v in violations)


def test_verify_pairing_condition_iii():
    # pair (OAC, OBC) while d_z > 2 d_m + 2
    labels = [["A", "C"], ["B", "D"], ["ABC", "ACD"], ["BCD", "ABD"],
              ["OCD", "OAB"], ["OAC", "OBC"], ["OBD", "OAD"], ["OABCD", "I"]]
    sched = StageSchedule.from_labels(labels)
    violations = verify_pairing(sched, 31, 8, 26, 9)
    assert any(v.item == "iii" and v.stage == 6 for v in violations)
    # with generous d_m the same pairing is fine apart from other items
    violations = verify_pairing(sched, 31, 8, 26, 23)
    assert not any(v.item == "iii" for v in violations)


def test_verify_pairing_parity_errors():
    with pytest.raises(ValueError):
        verify_pairing(default_stage_schedule(), 18, 8, 12, 7)
    with pytest.raises(ValueError):
        verify_pairing(default_stage_schedule(), 19, 7, 12, 7)


def test_violations_serializable():
    v = PairingViolation("i", None, "detail")
    assert v.to_dict() == {"item": "i", "stage": None, "detail": "detail"}


def test_default_passes_admissible_grid():
    sched = default_stage_schedule()
    for d_out in range(11, 82, 2):
        for d_z in range(6, 29, 2):
            for d_m in range(5, 28, 2):
                if d_z >= d_out or d_m >= d_out:
                    continue
                if not (d_out - d_z <= d_m < 2 * d_z):
                    continue
                assert verify_pairing(sched, d_out, 8, d_z, d_m) == []
