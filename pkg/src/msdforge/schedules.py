"""Validation and enumeration of syndrome-extraction entangling-gate
schedules.

A schedule is twelve positive integers [a,b,c,d,e,f; g,h,i,j,k,l] giving the
time steps of the entangling gates around a hexagonal face, Z-type half
first.  A valid schedule keeps every qubit in at most one gate per step and
prevents X- and Z-type check measurements from corrupting each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations


@dataclass(frozen=True)
class GateSchedule:
    steps: tuple[int, ...]

    def __post_init__(self):
        if len(self.steps) != 12:
            raise ValueError(f"schedule needs 12 entries, got {len(self.steps)}")
        if min(self.steps) < 1:
            raise ValueError("time steps must be positive")
        if set(self.steps) != set(range(1, self.length + 1)):
            raise ValueError(
                "schedule must use every integer from 1 to its maximum"
            )

    @property
    def length(self) -> int:
        return max(self.steps)

    @property
    def z_part(self) -> tuple[int, ...]:
        return self.steps[:6]

    @property
    def x_part(self) -> tuple[int, ...]:
        return self.steps[6:]

    def __str__(self) -> str:
        return (
            ",".join(map(str, self.z_part)) + ";" + ",".join(map(str, self.x_part))
        )

    @classmethod
    def parse(cls, text: str) -> "GateSchedule":
        halves = text.split(";")
        if len(halves) != 2:
            raise ValueError(f"expected 'a,..,f;g,..,l', got {text!r}")
        steps = tuple(int(v) for half in halves for v in half.split(","))
        return cls(steps)

    # Symmetry maps of the hexagonal face / patch.
    def rot120(self) -> "GateSchedule":
        a, b, c, d, e, f, g, h, i, j, k, l = self.steps
        return GateSchedule((c, d, e, f, a, b, i, j, k, l, g, h))

    def rot180(self) -> "GateSchedule":
        a, b, c, d, e, f, g, h, i, j, k, l = self.steps
        return GateSchedule((d, e, f, a, b, c, j, k, l, g, h, i))

    def swap_xz(self) -> "GateSchedule":
        return GateSchedule(self.x_part + self.z_part)


#: The four base length-7 schedules; the remaining valid ones are their
#: images under 120-degree rotations and the XZ-part exchange.
BASE_SCHEDULES = (
    GateSchedule((2, 1, 4, 5, 6, 3, 3, 2, 5, 6, 7, 4)),
    GateSchedule((2, 3, 6, 5, 4, 1, 3, 4, 7, 6, 5, 2)),
    GateSchedule((1, 2, 3, 6, 5, 4, 2, 3, 4, 7, 6, 5)),
    GateSchedule((1, 4, 5, 6, 3, 2, 2, 5, 6, 7, 4, 3)),
)

#: The schedule selected for the scheme (lowest worst-case logical failure
#: rate on a rectangular patch among the symmetry representatives).
SELECTED_SCHEDULE = GateSchedule((3, 6, 5, 4, 1, 2, 4, 7, 6, 5, 2, 3))


@dataclass(frozen=True)
class ScheduleReport:
    valid: bool
    distinctness_failures: tuple[str, ...]
    nonpositive_products: tuple[int, ...]  # indices into the 13-product list
    auxiliary_nonpositive: tuple[int, ...]  # informational six-product list

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "distinctness_failures": list(self.distinctness_failures),
            "nonpositive_products": list(self.nonpositive_products),
            "auxiliary_nonpositive": list(self.auxiliary_nonpositive),
        }


def _interference_products(s: GateSchedule) -> list[int]:
    a, b, c, d, e, f, g, h, i, j, k, l = s.steps
    return [
        (a - g) * (b - h) * (c - i) * (d - j) * (e - k) * (f - l),
        (a - g) * (b - h) * (f - l) * (e - k),
        (a - g) * (b - h) * (c - i) * (f - l),
        (a - g) * (b - h) * (c - i) * (d - j),
        (c - i) * (d - j) * (e - k) * (f - l),
        (a - g) * (d - j) * (e - k) * (f - l),
        (b - h) * (c - i) * (d - j) * (e - k),
        (a - k) * (b - j),
        (b - l) * (c - k),
        (c - g) * (d - l),
        (d - h) * (e - g),
        (e - i) * (f - h),
        (f - j) * (a - i),
    ]


def _auxiliary_products(s: GateSchedule) -> list[int]:
    a, b, c, d, e, f, g, h, i, j, k, l = s.steps
    return [
        (a - e) * (b - d),
        (b - f) * (c - e),
        (c - a) * (d - f),
        (g - k) * (h - j),
        (h - l) * (i - k),
        (i - g) * (j - l),
    ]


def validate_schedule(s: GateSchedule) -> ScheduleReport:
    """Check the hard validity conditions and the informational mixed-Pauli
    products (which provably follow for valid length-7 schedules)."""
    a, b, c, d, e, f, g, h, i, j, k, l = s.steps
    tuples = {
        "z-part": (a, b, c, d, e, f),
        "x-part": (g, h, i, j, k, l),
        "odd-positions": (a, c, e, g, i, k),
        "even-positions": (b, d, f, h, j, l),
    }
    distinct_fail = tuple(
        name for name, vals in tuples.items() if len(set(vals)) != 6
    )
    nonpositive = tuple(
        idx for idx, v in enumerate(_interference_products(s)) if v <= 0
    )
    aux_nonpositive = tuple(
        idx for idx, v in enumerate(_auxiliary_products(s)) if v <= 0
    )
    return ScheduleReport(
        valid=not distinct_fail and not nonpositive,
        distinctness_failures=distinct_fail,
        nonpositive_products=nonpositive,
        auxiliary_nonpositive=aux_nonpositive,
    )


def enumerate_valid(length: int) -> list[GateSchedule]:
    """Exhaustively enumerate valid schedules of the given length.

    The Z-part runs over six-value permutations; the X-part is backtracked
    with the per-step distinctness conditions pruning the search before the
    interference products are evaluated.
    """
    return list(_enumerate_valid(length))


@lru_cache(maxsize=8)
def _enumerate_valid(length: int) -> tuple[GateSchedule, ...]:
    if length < 6:
        return ()
    if length > 9:
        raise ValueError("enumeration beyond length 9 is not supported")
    values = frozenset(range(1, length + 1))
    out = []
    for z_vals in permutations(sorted(values), 6):
        odd_z = {z_vals[0], z_vals[2], z_vals[4]}
        even_z = {z_vals[1], z_vals[3], z_vals[5]}
        must_cover = values - set(z_vals)

        def backtrack(x_vals: list[int], used: set[int]) -> None:
            pos = len(x_vals)
            if pos == 6:
                if must_cover <= used:
                    sched = GateSchedule(tuple(z_vals) + tuple(x_vals))
                    if validate_schedule(sched).valid:
                        out.append(sched)
                return
            banned = odd_z if pos % 2 == 0 else even_z
            for v in values:
                if v in used or v in banned:
                    continue
                x_vals.append(v)
                used.add(v)
                backtrack(x_vals, used)
                x_vals.pop()
                used.remove(v)

        backtrack([], set())
    return tuple(out)


def symmetry_orbit(
    s: GateSchedule, include_rot120: bool = True
) -> set[GateSchedule]:
    """Closure of a valid schedule under the symmetry maps (120- and
    180-degree rotations and the XZ-part exchange)."""
    if not validate_schedule(s).valid:
        raise ValueError("symmetry orbits are defined for valid schedules")
    orbit = {s}
    frontier = [s]
    while frontier:
        cur = frontier.pop()
        images = [cur.rot180(), cur.swap_xz()]
        if include_rot120:
            images.append(cur.rot120())
        for img in images:
            if img not in orbit:
                orbit.add(img)
                frontier.append(img)
    return orbit
