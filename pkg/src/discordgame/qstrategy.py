"""Behavioral quantum strategy: local measurements on a shared two-qubit state.

Each stage measures one qubit in a fixed basis and maps the outcome to an
action. Joint action probabilities follow sequential collapse: the first
measurement projects and renormalizes the state, and the second is applied to
each branch. The stage-2 basis never depends on the stage-1 outcome.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import linalg
from .games import ACTIONS, ExtensiveGame, GameError
from .measures import ZERO_PROB, ProjectiveMeasurement, computational, x_basis
from .rng import SplitMix64


@dataclass(frozen=True, eq=False)
class SchemeStage:
    stage: int
    measurement: ProjectiveMeasurement
    action_map: dict

    @property
    def subsystem(self) -> str:
        return self.measurement.subsystem

    def action(self, outcome: int) -> str:
        return self.action_map[self.measurement.labels[outcome]]


@dataclass(frozen=True, eq=False)
class MeasurementScheme:
    """Stages listed in the order the measurements are applied.

    ``stage`` fields give each action's position in the played sequence, so
    the application order may differ from the stage order.
    """

    stages: tuple

    def __post_init__(self):
        stages = tuple(self.stages)
        subs = sorted(s.subsystem for s in stages)
        if subs != sorted(set(subs)) or set(subs) != set(linalg.SUBSYSTEMS):
            raise ValueError("each subsystem must be measured exactly once")
        if sorted(s.stage for s in stages) != list(range(len(stages))):
            raise ValueError("stage indices must be 0..n-1")
        for s in stages:
            if set(s.action_map) != set(s.measurement.labels):
                raise ValueError(f"action map for stage {s.stage} is not total over {s.measurement.labels}")
            if any(a not in ACTIONS for a in s.action_map.values()):
                raise ValueError(f"unknown action in {s.action_map}")
        object.__setattr__(self, "stages", stages)

    def __len__(self) -> int:
        return len(self.stages)

    def reordered(self, order) -> "MeasurementScheme":
        """Same stages, applied in a different order."""
        return MeasurementScheme(tuple(self.stages[i] for i in order))


def make_paper_scheme(swap_second: bool = False) -> MeasurementScheme:
    """A in the computational basis (0 -> L, 1 -> R), then B in the X basis (- -> L, + -> R).

    ``swap_second`` exchanges the stage-2 labels, a control that should
    produce only matching actions.
    """
    second = {"-": "R", "+": "L"} if swap_second else {"-": "L", "+": "R"}
    return MeasurementScheme(
        (
            SchemeStage(0, computational("A"), {"0": "L", "1": "R"}),
            SchemeStage(1, x_basis("B"), second),
        )
    )


@dataclass(frozen=True)
class Branch:
    outcomes: tuple
    probability: float
    state: np.ndarray | None
    measurements: tuple


def collapse_branches(rho, scheme: MeasurementScheme) -> list[Branch]:
    """Leaves of the sequential-collapse tree, one per outcome sequence.

    A branch whose probability falls below ``1e-12`` keeps probability 0 and
    no state, and is not measured further.
    """
    branches = [Branch((), 1.0, linalg.as_matrix(rho), ())]
    for st in scheme.stages:
        nxt = []
        for br in branches:
            for i in range(2):
                if br.state is None:
                    nxt.append(Branch(br.outcomes + (i,), 0.0, None, br.measurements + (st.measurement,)))
                    continue
                proj = st.measurement.embedded(i)
                post = proj @ br.state @ proj
                p = float(np.real(np.trace(post)))
                if p < ZERO_PROB:
                    nxt.append(Branch(br.outcomes + (i,), 0.0, None, br.measurements + (st.measurement,)))
                else:
                    nxt.append(
                        Branch(br.outcomes + (i,), br.probability * p, post / p, br.measurements + (st.measurement,))
                    )
        branches = nxt
    return branches


def _actions_for(scheme: MeasurementScheme, outcomes) -> tuple:
    acts = [None] * len(scheme)
    for st, o in zip(scheme.stages, outcomes):
        acts[st.stage] = st.action(o)
    return tuple(acts)


def _empty_table(n: int, value=0.0) -> dict:
    return {seq: value for seq in itertools.product(ACTIONS, repeat=n)}


def joint_action_distribution(rho, scheme: MeasurementScheme) -> dict:
    """Probability of every ordered action tuple, by sequential collapse."""
    dist = _empty_table(len(scheme))
    for br in collapse_branches(rho, scheme):
        dist[_actions_for(scheme, br.outcomes)] += br.probability
    return dist


def joint_born_distribution(rho, scheme: MeasurementScheme) -> dict:
    """Cross-check using ``Tr[(P_i (x) Q_j) rho]`` directly; valid because local measurements commute."""
    rho = linalg.as_matrix(rho)
    dist = _empty_table(len(scheme))
    for outcomes in itertools.product(range(2), repeat=len(scheme)):
        op = np.eye(4, dtype=complex)
        for st, o in zip(scheme.stages, outcomes):
            op = op @ st.measurement.embedded(o)
        dist[_actions_for(scheme, outcomes)] += float(np.real(np.trace(op @ rho)))
    return dist


def expected_quantum_payoff(rho, scheme: MeasurementScheme, g: ExtensiveGame) -> float:
    if len(scheme) != g.stages:
        raise GameError(f"scheme has {len(scheme)} stages, game has {g.stages}")
    return sum(p * g.utility(seq) for seq, p in joint_action_distribution(rho, scheme).items())


def sample_play(rho, scheme: MeasurementScheme, seed: int, n: int) -> dict:
    """Counts of each action tuple over ``n`` simulated plays.

    Each play walks the collapse tree: one SplitMix64 uniform per stage picks
    outcome 0 when it is below the conditional probability of outcome 0.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    # conditional probability of outcome 0 given the outcome prefix
    p_zero = {}
    leaves = collapse_branches(rho, scheme)
    prefix_mass = {}
    for br in leaves:
        for k in range(len(br.outcomes) + 1):
            key = br.outcomes[:k]
            prefix_mass[key] = prefix_mass.get(key, 0.0) + br.probability
    for key, mass in prefix_mass.items():
        if len(key) < len(scheme):
            p_zero[key] = prefix_mass[key + (0,)] / mass if mass > 0 else 1.0
    actions = {br.outcomes: _actions_for(scheme, br.outcomes) for br in leaves}

    counts = _empty_table(len(scheme), 0)
    gen = SplitMix64(seed)
    depth = len(scheme)
    for _ in range(n):
        prefix = ()
        for _ in range(depth):
            prefix += (0,) if gen.random() < p_zero[prefix] else (1,)
        counts[actions[prefix]] += 1
    return counts


def chi_square(counts: dict, dist: dict) -> tuple[float, int]:
    """Pearson statistic and degrees of freedom over cells with positive expectation.

    Any count in a zero-probability cell makes the statistic infinite.
    """
    n = sum(counts.values())
    stat, cells = 0.0, 0
    for seq, p in dist.items():
        if p <= ZERO_PROB:
            if counts[seq]:
                return float("inf"), 0
            continue
        expected = n * p
        stat += (counts[seq] - expected) ** 2 / expected
        cells += 1
    return stat, max(cells - 1, 0)


def chi_square_quantile(df: int, q: float = 0.999) -> float:
    return float(stats.chi2.ppf(q, df))
