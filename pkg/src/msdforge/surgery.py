"""Macroscopic planning of a general lattice-surgery operation.

Given a pair of commuting multi-qubit logical Paulis over N triangular
patches arranged around an ancillary region, this module determines the
boundary colors between neighbouring patches and the domain-wall type placed
in front of each patch, so that the first (second) operator becomes a product
of green-X (green-Z) string operators inside the region.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence


class Pauli(Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"

    @property
    def charge(self) -> str:
        if self is Pauli.I:
            raise ValueError("identity has no charge label")
        return self.value.lower()


def _anticommute(a: Pauli, b: Pauli) -> bool:
    return a is not Pauli.I and b is not Pauli.I and a is not b


class WallType(Enum):
    OPAQUE = "opaque"
    TRANSPARENT = "transparent"
    SEMI_TRANSPARENT = "semi-transparent"


@dataclass(frozen=True)
class DomainWall:
    kind: WallType
    # transparent: charge-label permutation rules, patch side <-> region side
    permutation: tuple[tuple[str, str], ...] | None = None
    # semi-transparent: condensed charges on (patch side, region side)
    condensed: tuple[str, str] | None = None
    em_exchanging: bool = False

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind.value}
        if self.permutation is not None:
            d["permutation"] = [list(rule) for rule in self.permutation]
        if self.condensed is not None:
            d["condensed"] = list(self.condensed)
            d["em_exchanging"] = self.em_exchanging
        return d


@dataclass(frozen=True)
class SurgeryPlan:
    boundary_colors: tuple[str, ...]  # c_1..c_N; c_i sits between patches i-1, i
    walls: tuple[DomainWall, ...]

    def to_dict(self) -> dict:
        return {
            "boundary_colors": list(self.boundary_colors),
            "walls": [w.to_dict() for w in self.walls],
        }


def _wall_for(p: Pauli, q: Pauli, c_in: str, c_out: str) -> DomainWall:
    if p is Pauli.I and q is Pauli.I:
        return DomainWall(WallType.OPAQUE)
    if _anticommute(p, q):
        return DomainWall(
            WallType.TRANSPARENT,
            permutation=(
                ("g", c_in),
                ("b", c_out),
                (p.charge, "x"),
                (q.charge, "z"),
            ),
        )
    if p is q:
        condensed = (f"r{p.charge}", f"{c_in}y")
    elif q is Pauli.I:
        condensed = (f"r{p.charge}", f"{c_in}z")
    else:
        condensed = (f"r{q.charge}", f"{c_in}x")
    return DomainWall(WallType.SEMI_TRANSPARENT, condensed=condensed,
                      em_exchanging=True)


def plan_surgery(
    paulis: Sequence[tuple[Pauli | str, Pauli | str]],
    first_color: str = "g",
) -> SurgeryPlan:
    """Plan the boundary colors and domain walls for measuring the operator
    pair given site-by-site as (P_i, Q_i).

    The two global products must commute; otherwise no consistent coloring of
    the region boundaries exists and a ValueError is raised.
    """
    if first_color not in ("g", "b"):
        raise ValueError(f"boundary colors are 'g' or 'b', got {first_color!r}")
    sites = [
        (Pauli(p) if isinstance(p, str) else p, Pauli(q) if isinstance(q, str) else q)
        for p, q in paulis
    ]
    if not sites:
        raise ValueError("need at least one patch")
    flips = [_anticommute(p, q) for p, q in sites]
    if sum(flips) % 2:
        raise ValueError(
            "operators anticommute (odd number of anticommuting sites); "
            "no valid boundary coloring exists"
        )

    other = {"g": "b", "b": "g"}
    colors = [first_color]  # colors[i] = c_{i+1} between patches i and i+1
    for flip in flips[:-1]:
        colors.append(other[colors[-1]] if flip else colors[-1])
    # Cyclic consistency between c_N -> c_1 holds because flips sum to even.

    walls = []
    n = len(sites)
    for i, (p, q) in enumerate(sites):
        c_in = colors[i]                 # boundary before patch i (c_i)
        c_out = colors[(i + 1) % n]      # boundary after patch i (c_{i+1})
        walls.append(_wall_for(p, q, c_in, c_out))
    return SurgeryPlan(boundary_colors=tuple(colors), walls=tuple(walls))
