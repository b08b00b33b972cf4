"""Discrete-time Monte Carlo simulation of the magic-state preparation cycle
in the cultivation-MSD scheme.

Two groups of n_m triangular patches run cultivation attempts as often as the
group launch-spacing constraint allows.  Successful cultivations grow to
distance d_m (with post-selected acceptance), after which the state waits for
a partner from the other group; a distillation stage launches once both
groups hold a ready state, occupying the ancillary region for the merge plus
one measurement round.  The simulation estimates the average rounds between
stage initiations (t_intv) and the average rounds states idle before
consumption (t_idle).
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field

from .scheme import T_ROUND


@dataclass(frozen=True)
class CycleConfig:
    n_m: int                      # patches per group
    t_cult: int                   # cultivation duration in time steps
    d_m: int
    d_cult: int
    q_cult_succ: float
    p_acc: float                  # growing acceptance probability
    t_round: int = T_ROUND
    merge_rounds: int | None = None  # defaults to d_m
    seed: int = 0
    n_stages: int = 1000
    warmup_stages: int = 10

    def __post_init__(self):
        if not 0.0 < self.q_cult_succ <= 1.0:
            raise ValueError("q_cult_succ must be in (0, 1]")
        if not 0.0 < self.p_acc <= 1.0:
            raise ValueError("p_acc must be in (0, 1]")
        if self.n_m < 1 or self.t_cult < 1 or self.d_m < 1:
            raise ValueError("n_m, t_cult, d_m must be positive")
        if self.d_cult > self.d_m:
            raise ValueError("d_cult cannot exceed d_m")

    @property
    def t_m(self) -> int:
        """Minimum rounds between successive cultivation launches per group."""
        return math.ceil(self.t_cult / (self.t_round * self.n_m))

    @property
    def cult_rounds(self) -> int:
        return math.ceil(self.t_cult / self.t_round)

    @property
    def grow_rounds(self) -> int:
        """Growing plus the joint post-selection window; skipped entirely when
        the patch is already at d_m."""
        return 0 if self.d_m == self.d_cult else self.d_m

    @property
    def surgery_rounds(self) -> int:
        merge = self.merge_rounds if self.merge_rounds is not None else self.d_m
        return merge + 1  # merge plus the measurement/reinit round


def t_m(config: CycleConfig) -> int:
    return config.t_m


@dataclass(frozen=True)
class CycleStats:
    t_intv_mean: float
    t_intv_stderr: float
    t_idle_mean: float
    t_idle_stderr: float
    stages: int
    gap_histogram: tuple[tuple[int, int], ...]
    discards: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "t_intv_mean": self.t_intv_mean,
            "t_intv_stderr": self.t_intv_stderr,
            "t_idle_mean": self.t_idle_mean,
            "t_idle_stderr": self.t_idle_stderr,
            "stages": self.stages,
            "gap_histogram": [list(pair) for pair in self.gap_histogram],
            "discards": dict(self.discards),
        }


@dataclass
class _Group:
    n_m: int
    next_launch_ok: int = 0        # earliest round a cultivation may start
    patch_free: list[int] = field(default_factory=list)  # per-patch free time
    ready_at: int | None = None    # completion round of the held state
    ready_patch: int | None = None

    def __post_init__(self):
        self.patch_free = [0] * self.n_m


def _mean_stderr(samples: list[float]) -> tuple[float, float]:
    n = len(samples)
    if n == 0:
        return math.nan, math.nan
    mean = sum(samples) / n
    if n == 1:
        return mean, 0.0
    var = sum((x - mean) ** 2 for x in samples) / (n - 1)
    return mean, math.sqrt(var / n)


def simulate(config: CycleConfig) -> CycleStats:
    """Run the preparation cycle for warmup + n_stages stages.

    Time advances in integer rounds.  Pipelines per patch are tracked through
    completion events; states completing while lattice surgery occupies the
    ancillary region are discarded (window inclusive at the starting round,
    exclusive at the end), and a fresh same-group state displaces an idle
    older one.
    """
    rng = random.Random(config.seed)
    groups = (_Group(config.n_m), _Group(config.n_m))
    discards: Counter[str] = Counter()
    # Pending completions: (round, group, patch), kept sorted by round.
    pending: list[tuple[int, int, int]] = []

    surgery_until = 0   # exclusive end of the current surgery window
    surgery_since = -1  # inclusive start, -1 when idle
    stage_starts: list[int] = []
    idle_samples: list[float] = []
    target = config.warmup_stages + config.n_stages

    def launch_attempts(now: int) -> None:
        for gi, grp in enumerate(groups):
            while grp.next_launch_ok <= now:
                patch = next(
                    (i for i, free in enumerate(grp.patch_free) if free <= now),
                    None,
                )
                if patch is None:
                    break
                # Outcome of the whole attempt is drawn up front; the state
                # is only real if cultivation and growing both succeed.
                done = now + config.cult_rounds
                if rng.random() < config.q_cult_succ:
                    done += config.grow_rounds
                    ok = config.grow_rounds == 0 or rng.random() < config.p_acc
                else:
                    ok = False
                grp.patch_free[patch] = done
                grp.next_launch_ok = now + config.t_m
                if ok:
                    pending.append((done, gi, patch))

    now = 0
    guard = 0
    while len(stage_starts) < target:
        guard += 1
        if guard > 10_000_000:
            raise RuntimeError("cycle simulation failed to progress")
        launch_attempts(now)

        pending.sort()
        while pending and pending[0][0] <= now:
            done, gi, patch = pending.pop(0)
            grp = groups[gi]
            if surgery_since <= done < surgery_until:
                discards["during_surgery"] += 1
                continue
            if grp.ready_at is not None:
                discards["displaced_by_newer"] += 1
            grp.ready_at = done
            grp.ready_patch = patch

        both_ready = all(g.ready_at is not None for g in groups)
        if both_ready and now >= surgery_until:
            stage_starts.append(now)
            for grp in groups:
                assert grp.ready_at is not None and grp.ready_patch is not None
                idle_samples.append(float(now - grp.ready_at))
                # The consumed patch is busy until the surgery completes.
                grp.patch_free[grp.ready_patch] = now + config.surgery_rounds
                grp.ready_at = None
                grp.ready_patch = None
            surgery_since = now
            surgery_until = now + config.surgery_rounds
            continue

        now += 1

    kept = stage_starts[config.warmup_stages:]
    gaps = [float(b - a) for a, b in zip(kept, kept[1:])]
    kept_idle = idle_samples[2 * config.warmup_stages:]
    t_intv_mean, t_intv_err = _mean_stderr(gaps)
    t_idle_mean, t_idle_err = _mean_stderr(kept_idle)
    hist = Counter(int(g) for g in gaps)
    return CycleStats(
        t_intv_mean=t_intv_mean,
        t_intv_stderr=t_intv_err,
        t_idle_mean=t_idle_mean,
        t_idle_stderr=t_idle_err,
        stages=len(gaps) + 1,
        gap_histogram=tuple(sorted(hist.items())),
        discards=dict(discards),
    )
