import pytest

from msdforge.scheme import (
    SchemeParams,
    Variant,
    derive_dims,
    n_rec,
    n_tri,
    space_cost,
    time_cost,
)

SNG_ROWS = [  # (distances, space, time)
    ((11, 8, 6, 5), 833, 384),
    ((19, 10, 12, 7), 2401, 512),
    ((19, 8, 12, 7), 2265, 512),
    ((25, 12, 16, 11), 4181, 768),
]

CMB_ROWS = [  # (d_out,d_x,d_z,d_m,d_cult,n_m), space (3 significant digits)
    ((23, 14, 16, 7, 3, 4), 5347),
    ((31, 18, 20, 11, 3, 3), 8825),
    ((41, 22, 28, 13, 3, 4), 15900),
    ((49, 30, 34, 15, 5, 4), 25200),
    ((59, 34, 40, 19, 5, 6), 40200),
    ((63, 40, 44, 19, 5, 8), 60500),
    ((29, 16, 20, 9, 3, 5), 9081),
    ((39, 22, 26, 13, 3, 4), 15000),
    ((51, 28, 36, 15, 3, 4), 26000),
    ((63, 36, 46, 17, 5, 6), 45800),
    ((71, 36, 48, 23, 5, 8), 67000),
    ((81, 44, 58, 23, 5, 8), 90700),
]


def test_patch_counts():
    assert n_tri(3) == 13  # Steane patch: 7 data + 6 syndrome
    assert n_tri(5) == 37
    assert n_rec(8, 12) == 250
    assert n_rec(4, 4) == 3 * 16 - 16 + 2
    for d in range(3, 10):
        assert n_rec(d, d) == 3 * d * d - 4 * d + 2
        if d % 2 == 1:
            assert n_tri(d) == (3 * d * d - 1) // 2


# Counting oracle: explicit lattice construction of the triangular patch
# (triangular-lattice points in a corner region; every third point hosts a
# face, the rest are data qubits; each face carries two syndrome qubits).
def _triangular_lattice_counts(d: int) -> tuple[int, int]:
    side = 3 * (d - 1) // 2
    pts = [(x, y) for x in range(side + 1) for y in range(side + 1 - x)]
    faces = [p for p in pts if (p[0] - p[1]) % 3 == 1]
    return len(pts) - len(faces), len(faces)


NEIGHBORS = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)]


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_triangular_counting_oracle(d):
    data, faces = _triangular_lattice_counts(d)
    assert data == (3 * d * d + 1) // 4
    assert faces == (3 * d * d - 3) // 8
    assert data + 2 * faces == n_tri(d)


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_triangular_lattice_structure(d):
    side = 3 * (d - 1) // 2
    pts = {(x, y) for x in range(side + 1) for y in range(side + 1 - x)}
    faces = {p for p in pts if (p[0] - p[1]) % 3 == 1}
    qubits = pts - faces
    weights = [
        sum(1 for dx, dy in NEIGHBORS if (fx + dx, fy + dy) in qubits)
        for fx, fy in faces
    ]
    assert set(weights) <= {4, 6}
    # boundary faces are weight 4, one run of them per side
    assert weights.count(4) == 3 * (d - 1) // 2
    # every qubit touches one to three faces (three in the bulk)
    for qx, qy in qubits:
        nf = sum(1 for dx, dy in NEIGHBORS if (qx + dx, qy + dy) in faces)
        assert 1 <= nf <= 3


def test_rectangular_seed_patch():
    # smallest rectangular patch: a single weight-4 hexagon, 4 data qubits
    pts = {(a, b) for b in (0, 1) for a in range(-1, 3) if 0 <= 2 * a + b <= 4}
    faces = {p for p in pts if (p[0] - p[1]) % 3 == 1}
    assert len(faces) == 1 and len(pts - faces) == 4
    assert len(pts - faces) + 2 * len(faces) == n_rec(2, 2)


@pytest.mark.parametrize("dists,space,time", SNG_ROWS)
def test_single_level_costs(dists, space, time):
    s = SchemeParams(Variant.SINGLE_LEVEL, *dists)
    assert space_cost(s) == space
    assert time_cost(s) == time


@pytest.mark.parametrize("args,space", CMB_ROWS)
def test_combined_costs(args, space):
    d_out, d_x, d_z, d_m, d_cult, n_m = args
    s = SchemeParams(
        Variant.CULTIVATION_MSD, d_out, d_x, d_z, d_m, d_cult=d_cult, n_m=n_m
    )
    got = space_cost(s, n_cult=n_tri(d_cult))
    assert got == pytest.approx(space, rel=0.01)


def test_combined_time_cost():
    s = SchemeParams(
        Variant.CULTIVATION_MSD, 39, 22, 26, 13, d_cult=3, n_m=4, t_intv=21.7
    )
    assert time_cost(s) == pytest.approx(8 * 8 * 21.7)
    assert time_cost(s) == pytest.approx(1391, rel=0.01)
    with pytest.raises(ValueError):
        time_cost(SchemeParams(Variant.CULTIVATION_MSD, 39, 22, 26, 13,
                               d_cult=3, n_m=4))


def test_derive_dims():
    sng = SchemeParams(Variant.SINGLE_LEVEL, 19, 8, 12, 7)
    dims = derive_dims(sng)
    assert (dims.d_h, dims.d_v) == (24, 12)
    cmb = SchemeParams(
        Variant.CULTIVATION_MSD, 39, 22, 26, 13, d_cult=3, n_m=4
    )
    dims = derive_dims(cmb)
    assert (dims.d_h, dims.d_v, dims.n_m_side) == (80, 28, 2)


def test_derive_dims_tie():
    s = SchemeParams(Variant.SINGLE_LEVEL, 11, 8, 6, 5)
    assert derive_dims(s).d_h == 12  # d_out + 1 == 2 d_z


def test_param_validation():
    with pytest.raises(ValueError):
        SchemeParams(Variant.SINGLE_LEVEL, 3, 2, 2, 1)
    with pytest.raises(ValueError):
        SchemeParams(Variant.SINGLE_LEVEL, 19, 8, 12, 8)  # d_m parity
    with pytest.raises(ValueError):
        SchemeParams(Variant.SINGLE_LEVEL, 19, 8, 12, 5)  # condition (i)
    with pytest.raises(ValueError):
        SchemeParams(Variant.CULTIVATION_MSD, 19, 8, 12, 7)  # missing knobs
    with pytest.raises(ValueError):
        SchemeParams(Variant.CULTIVATION_MSD, 19, 8, 12, 7, d_cult=7, n_m=4)
    with pytest.raises(ValueError):
        SchemeParams(Variant.SINGLE_LEVEL, 19, 8, 12, 7, p=0.0)


def test_labels():
    assert SchemeParams(Variant.SINGLE_LEVEL, 19, 8, 12, 7).label() == \
        "sng-(19,8,12,7)"
    s = SchemeParams(Variant.CULTIVATION_MSD, 39, 22, 26, 13,
                     d_cult=3, n_m=4, c_gap=7.6)
    assert s.label() == "cmb-(39,22,26,13,3,4,7.6)"
