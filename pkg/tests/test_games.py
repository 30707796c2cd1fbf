import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discordgame import games
from discordgame.games import BehavioralStrategy, MixedStrategy


@pytest.mark.parametrize("a1, a2, u", [("L", "R", 1), ("L", "L", 0), ("R", "L", 1), ("R", "R", 0)])
def test_payoff(a1, a2, u):
    assert games.payoff(a1, a2) == u


def test_payoff_unknown_action():
    with pytest.raises(games.GameError):
        games.payoff("L", "X")


def test_variants():
    single = games.make_paper_game("single_infoset")
    aware = games.make_paper_game("stage_aware")
    assert single.info_sets == ((0, 1),)
    assert single.info_set_of(0) == single.info_set_of(1) == 0
    assert aware.num_info_sets == 2
    assert single.payoffs == aware.payoffs == {"LL": 0.0, "LR": 1.0, "RL": 1.0, "RR": 0.0}
    with pytest.raises(games.GameError):
        games.make_paper_game("perfect")


def test_game_validation():
    with pytest.raises(games.GameError):
        games.ExtensiveGame(2, ((0,),), {"LL": 0, "LR": 1, "RL": 1, "RR": 0})
    with pytest.raises(games.GameError):
        games.ExtensiveGame(2, ((0, 1), (1,)), {"LL": 0, "LR": 1, "RL": 1, "RR": 0})
    with pytest.raises(games.GameError):
        games.ExtensiveGame(2, ((0, 1),), {"LL": 0, "LR": 1})


def test_game_json_roundtrip():
    g = games.make_paper_game("stage_aware")
    doc = json.loads(json.dumps(g.to_json()))
    assert doc["info_sets"] == [[0], [1]]
    assert doc["payoff"]["LR"] == 1
    assert games.ExtensiveGame.from_json(doc) == g


def test_game_json_malformed():
    with pytest.raises(games.GameError):
        games.ExtensiveGame.from_json({"stages": 2})


@pytest.mark.parametrize(
    "variant, probs, expected",
    [
        ("single_infoset", (0.5,), 0.5),
        ("single_infoset", (0.0,), 0.0),
        ("stage_aware", (1.0, 0.0), 1.0),
    ],
)
def test_behavioral_examples(variant, probs, expected):
    g = games.make_paper_game(variant)
    assert games.expected_payoff_behavioral(g, BehavioralStrategy(probs)) == pytest.approx(expected, abs=1e-15)


def test_behavioral_closed_form_single_infoset():
    g = games.make_paper_game("single_infoset")
    for p in np.linspace(0, 1, 101):
        assert games.expected_payoff_behavioral(g, BehavioralStrategy((p,))) == pytest.approx(2 * p * (1 - p), abs=1e-12)


def test_behavioral_closed_form_stage_aware():
    g = games.make_paper_game("stage_aware")
    for p1, p2 in itertools.product(np.linspace(0, 1, 11), repeat=2):
        val = games.expected_payoff_behavioral(g, BehavioralStrategy((p1, p2)))
        assert val == pytest.approx(p1 * (1 - p2) + (1 - p1) * p2, abs=1e-12)


def test_behavioral_missing_info_set():
    with pytest.raises(games.GameError):
        games.expected_payoff_behavioral(games.make_paper_game("stage_aware"), BehavioralStrategy((0.5,)))
    with pytest.raises(games.GameError):
        BehavioralStrategy((1.5,))


def test_best_behavioral_single_infoset():
    s, val = games.best_behavioral(games.make_paper_game("single_infoset"))
    assert val == pytest.approx(0.5, abs=1e-12)
    assert s.prob_left[0] == pytest.approx(0.5, abs=1e-6)


def test_best_behavioral_stage_aware():
    s, val = games.best_behavioral(games.make_paper_game("stage_aware"))
    # brute force of the closed form over a fine grid
    grid = np.linspace(0, 1, 201)
    oracle = max(p1 * (1 - p2) + (1 - p1) * p2 for p1 in grid for p2 in grid)
    assert val == pytest.approx(oracle, abs=1e-12) == 1.0
    assert s.prob_left == (0.0, 1.0)  # lexicographically smaller of the two corners


def test_best_behavioral_even_grid_refines_to_half():
    # 0.5 is not on a 4-point grid; refinement has to find it
    s, val = games.best_behavioral(games.make_paper_game("single_infoset"), grid_steps=4)
    assert val == pytest.approx(0.5, abs=1e-12)
    assert s.prob_left[0] == pytest.approx(0.5, abs=1e-6)


def test_best_behavioral_zero_game():
    g = games.ExtensiveGame(2, ((0, 1),), {k: 0 for k in ("LL", "LR", "RL", "RR")})
    s, val = games.best_behavioral(g)
    assert val == 0.0
    assert s.prob_left == (0.0,)


def test_best_behavioral_grid_steps():
    with pytest.raises(games.GameError):
        games.best_behavioral(games.make_paper_game(), grid_steps=1)


@pytest.mark.parametrize(
    "weights, expected",
    [
        ({"LR": 0.5, "RL": 0.5}, 1.0),
        ({"LL": 1.0}, 0.0),
        ({"LL": 0.25, "LR": 0.25, "RL": 0.25, "RR": 0.25}, 0.5),
    ],
)
def test_mixed_examples(weights, expected):
    g = games.make_paper_game()
    assert games.expected_payoff_mixed(g, MixedStrategy(weights)) == expected


def test_paper_mixed_strategy_exact():
    assert games.expected_payoff_mixed(games.make_paper_game(), games.paper_mixed_strategy()) == 1.0


def test_mixed_validation():
    with pytest.raises(games.GameError):
        MixedStrategy({"LR": 0.7})
    with pytest.raises(games.GameError):
        MixedStrategy({"LR": 1.5, "RL": -0.5})
    with pytest.raises(games.GameError):
        games.expected_payoff_mixed(games.make_paper_game(), MixedStrategy({"LRL": 1.0}))


def test_mixed_accepts_tuple_plans():
    assert MixedStrategy({("L", "R"): 1.0}).weights == {"LR": 1.0}


def test_best_mixed():
    for variant in ("single_infoset", "stage_aware"):
        g = games.make_paper_game(variant)
        s, val = games.best_mixed(g)
        assert val == 1.0
        assert s.weights == {"LR": 1.0}
        assert games.best_behavioral(g)[1] <= val + 1e-9
    zero = games.ExtensiveGame(2, ((0,), (1,)), {k: 0 for k in ("LL", "LR", "RL", "RR")})
    assert games.best_mixed(zero) == (MixedStrategy({"LL": 1.0}), 0.0)


payoff_tables = st.lists(st.floats(-10, 10, allow_nan=False), min_size=4, max_size=4)
weight_vectors = st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda w: sum(w) > 1e-3)


@given(payoff_tables)
def test_best_mixed_matches_direct_max(table):
    g = games.ExtensiveGame(2, ((0,), (1,)), dict(zip(("LL", "LR", "RL", "RR"), table)))
    assert games.best_mixed(g)[1] == max(table)


@given(payoff_tables, weight_vectors, weight_vectors, st.floats(0, 1))
def test_mixed_is_linear(table, w1, w2, lam):
    g = games.ExtensiveGame(2, ((0, 1),), dict(zip(("LL", "LR", "RL", "RR"), table)))
    plans = ("LL", "LR", "RL", "RR")
    s1 = MixedStrategy(dict(zip(plans, np.array(w1) / sum(w1))))
    s2 = MixedStrategy(dict(zip(plans, np.array(w2) / sum(w2))))
    mix = MixedStrategy({p: lam * s1.weights[p] + (1 - lam) * s2.weights[p] for p in plans})
    expected = lam * games.expected_payoff_mixed(g, s1) + (1 - lam) * games.expected_payoff_mixed(g, s2)
    assert games.expected_payoff_mixed(g, mix) == pytest.approx(expected, abs=1e-12)


def test_three_stage_game():
    # engine handles more than two stages
    payoffs = {"".join(p): float(p.count("L")) for p in itertools.product("LR", repeat=3)}
    g = games.ExtensiveGame(3, ((0, 2), (1,)), payoffs)
    assert games.expected_payoff_behavioral(g, BehavioralStrategy((1.0, 0.0))) == 2.0
    assert games.best_mixed(g)[1] == 3.0
