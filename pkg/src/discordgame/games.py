"""Single-agent sequential games where imperfect recall is expressed by information sets.

A decision point is identified with its stage index. Every stage belongs to
one information set, and a behavioral strategy draws independently at each
stage from the distribution attached to that stage's information set.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

ACTIONS = ("L", "R")
TIE_TOL = 1e-15
REFINE_STEP = 1e-6


class GameError(ValueError):
    pass


def payoff(a1: str, a2: str) -> int:
    """1 when the two actions differ, 0 when they coincide."""
    for a in (a1, a2):
        if a not in ACTIONS:
            raise GameError(f"unknown action {a!r}")
    return int(a1 != a2)


@dataclass(frozen=True)
class ExtensiveGame:
    """Finite single-agent game with binary actions.

    Attributes
    ----------
    stages : int
        Number of sequential decisions.
    info_sets : tuple of tuple of int
        Partition of the stage indices into information sets; set ``k`` is
        ``info_sets[k]``.
    payoffs : dict
        Utility for every action string of length ``stages`` (e.g. ``"LR"``).
    """

    stages: int
    info_sets: tuple
    payoffs: dict = field(hash=False)
    actions: tuple = ACTIONS

    def __post_init__(self):
        sets = tuple(tuple(int(s) for s in group) for group in self.info_sets)
        object.__setattr__(self, "info_sets", sets)
        flat = sorted(s for group in sets for s in group)
        if flat != list(range(self.stages)):
            raise GameError("info_sets must partition the stages: each stage in exactly one set")
        missing = [seq for seq in self.sequences() if seq not in self.payoffs]
        if missing:
            raise GameError(f"payoff undefined for {missing}")
        object.__setattr__(self, "payoffs", {k: float(v) for k, v in self.payoffs.items()})

    def info_set_of(self, stage: int) -> int:
        for k, group in enumerate(self.info_sets):
            if stage in group:
                return k
        raise GameError(f"stage {stage} out of range")

    @property
    def num_info_sets(self) -> int:
        return len(self.info_sets)

    def sequences(self) -> list[str]:
        """All action strings in lexicographic order (``L < R``)."""
        return ["".join(p) for p in itertools.product(self.actions, repeat=self.stages)]

    def utility(self, seq) -> float:
        key = "".join(seq)
        if key not in self.payoffs:
            raise GameError(f"malformed action sequence {seq!r}")
        return self.payoffs[key]

    def to_json(self) -> dict:
        return {
            "stages": self.stages,
            "actions": list(self.actions),
            "info_sets": [list(g) for g in self.info_sets],
            "payoff": dict(self.payoffs),
        }

    @classmethod
    def from_json(cls, doc) -> "ExtensiveGame":
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        try:
            return cls(
                stages=int(doc["stages"]),
                info_sets=tuple(tuple(g) for g in doc["info_sets"]),
                payoffs=dict(doc["payoff"]),
                actions=tuple(doc.get("actions", ACTIONS)),
            )
        except (KeyError, TypeError) as exc:
            raise GameError(f"malformed game document: {exc!r}") from exc


def make_paper_game(variant: str = "single_infoset") -> ExtensiveGame:
    """Two stages, alternating-action payoff.

    ``single_infoset`` puts both stages in one information set;
    ``stage_aware`` gives each stage its own.
    """
    payoffs = {a + b: payoff(a, b) for a, b in itertools.product(ACTIONS, repeat=2)}
    if variant == "single_infoset":
        return ExtensiveGame(2, ((0, 1),), payoffs)
    if variant == "stage_aware":
        return ExtensiveGame(2, ((0,), (1,)), payoffs)
    raise GameError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class BehavioralStrategy:
    """Probability of playing ``L`` at each information set."""

    prob_left: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.prob_left)
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise GameError(f"probabilities must lie in [0, 1]: {probs}")
        object.__setattr__(self, "prob_left", probs)


@dataclass(frozen=True)
class MixedStrategy:
    """Distribution over pure plans; a plan is an action string, one action per stage."""

    weights: dict

    def __post_init__(self):
        w = {str(k) if isinstance(k, str) else "".join(k): float(v) for k, v in self.weights.items()}
        if any(v < 0 for v in w.values()) or abs(sum(w.values()) - 1.0) > 1e-12:
            raise GameError("mixed-strategy weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)


def paper_mixed_strategy() -> MixedStrategy:
    """Half (L, R), half (R, L)."""
    return MixedStrategy({"LR": 0.5, "RL": 0.5})


def expected_payoff_behavioral(g: ExtensiveGame, s: BehavioralStrategy) -> float:
    if len(s.prob_left) != g.num_info_sets:
        raise GameError(f"strategy covers {len(s.prob_left)} information sets, game has {g.num_info_sets}")
    stage_p = [s.prob_left[g.info_set_of(t)] for t in range(g.stages)]
    total = 0.0
    for seq in g.sequences():
        w = 1.0
        for t, a in enumerate(seq):
            w *= stage_p[t] if a == "L" else 1.0 - stage_p[t]
        total += w * g.payoffs[seq]
    return total


def _pick(points: np.ndarray, values: np.ndarray) -> int:
    best = values.max()
    tied = np.flatnonzero(values >= best - TIE_TOL)
    return int(min(tied, key=lambda k: tuple(points[k])))


def best_behavioral(g: ExtensiveGame, grid_steps: int = 101) -> tuple[BehavioralStrategy, float]:
    """Grid search over ``[0, 1]^k`` followed by local refinement to step ``< 1e-6``.

    Near-ties (within ``1e-15``) resolve to the lexicographically smallest
    probability vector.
    """
    if grid_steps < 2:
        raise GameError("grid_steps must be at least 2")
    k = g.num_info_sets

    def evaluate(points):
        return np.array([expected_payoff_behavioral(g, BehavioralStrategy(p)) for p in points])

    axis = np.linspace(0.0, 1.0, grid_steps)
    pts = np.array(list(itertools.product(axis, repeat=k)))
    vals = evaluate(pts)
    i = _pick(pts, vals)
    x, fx = pts[i], vals[i]

    step = 1.0 / (grid_steps - 1)
    stencil = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=k)))
    while step >= REFINE_STEP:
        step /= 2
        cand = np.clip(x + stencil * step, 0.0, 1.0)
        cvals = evaluate(cand)
        cand = np.vstack([cand, x])
        cvals = np.append(cvals, fx)
        i = _pick(cand, cvals)
        x, fx = cand[i], cvals[i]
    return BehavioralStrategy(tuple(float(v) for v in x)), float(fx)


def expected_payoff_mixed(g: ExtensiveGame, s: MixedStrategy) -> float:
    return sum(w * g.utility(plan) for plan, w in s.weights.items())


def best_mixed(g: ExtensiveGame) -> tuple[MixedStrategy, float]:
    """Point mass on the best pure plan; ties go to the lexicographically first plan."""
    best_plan, best_val = None, -np.inf
    for plan in g.sequences():
        if g.payoffs[plan] > best_val:
            best_plan, best_val = plan, g.payoffs[plan]
    return MixedStrategy({best_plan: 1.0}), float(best_val)
