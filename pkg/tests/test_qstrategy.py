import time

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import density_matrices
from discordgame import games, linalg, measures, qstate, qstrategy
from discordgame.rng import SplitMix64

I2 = np.eye(2)
PAIRS = [("L", "L"), ("L", "R"), ("R", "L"), ("R", "R")]


def test_splitmix64_reference_vector():
    gen = SplitMix64(1234567)
    assert [gen.next_u64() for _ in range(5)] == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ]


def test_splitmix64_doubles_in_unit_interval():
    gen = SplitMix64(0)
    xs = [gen.random() for _ in range(1000)]
    assert min(xs) >= 0.0 and max(xs) < 1.0


def test_paper_scheme_maps():
    scheme = qstrategy.make_paper_scheme()
    first, second = scheme.stages
    assert first.subsystem == "A" and first.action_map == {"0": "L", "1": "R"}
    assert second.subsystem == "B" and second.action_map == {"-": "L", "+": "R"}
    assert sorted(s.subsystem for s in scheme.stages) == ["A", "B"]


def test_scheme_validation():
    comp = measures.computational
    with pytest.raises(ValueError):
        qstrategy.MeasurementScheme(
            (
                qstrategy.SchemeStage(0, comp("A"), {"0": "L", "1": "R"}),
                qstrategy.SchemeStage(1, comp("A"), {"0": "L", "1": "R"}),
            )
        )
    with pytest.raises(ValueError):
        qstrategy.MeasurementScheme(
            (
                qstrategy.SchemeStage(0, comp("A"), {"0": "L"}),
                qstrategy.SchemeStage(1, comp("B"), {"0": "L", "1": "R"}),
            )
        )


def test_distribution_paper(paper_rho):
    dist = qstrategy.joint_action_distribution(paper_rho, qstrategy.make_paper_scheme())
    expected = {("L", "R"): 0.5, ("R", "L"): 0.5, ("L", "L"): 0.0, ("R", "R"): 0.0}
    for k in PAIRS:
        assert dist[k] == pytest.approx(expected[k], abs=1e-12)
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)


def test_distribution_product_state():
    dist = qstrategy.joint_action_distribution(linalg.kron(I2 / 2, I2 / 2), qstrategy.make_paper_scheme())
    for k in PAIRS:
        assert dist[k] == pytest.approx(0.25, abs=1e-12)


def test_distribution_swapped(paper_rho):
    dist = qstrategy.joint_action_distribution(paper_rho, qstrategy.make_paper_scheme(swap_second=True))
    assert dist[("L", "L")] == pytest.approx(0.5, abs=1e-12)
    assert dist[("R", "R")] == pytest.approx(0.5, abs=1e-12)


def test_collapse_branches_post_states(paper_rho):
    branches = qstrategy.collapse_branches(paper_rho, qstrategy.make_paper_scheme())
    by_outcome = {b.outcomes: b for b in branches}
    # outcome 0 on A leaves B in |+>, so "+" (index 0) is certain there
    assert by_outcome[(0, 0)].probability == pytest.approx(0.5, abs=1e-12)
    assert by_outcome[(0, 1)].probability == 0.0 and by_outcome[(0, 1)].state is None
    expected = linalg.kron(qstate.basis_ket("zero").projector(), qstate.basis_ket("plus").projector())
    np.testing.assert_allclose(by_outcome[(0, 0)].state, expected, atol=1e-12)


def test_second_stage_is_memoryless(paper_rho):
    scheme = qstrategy.make_paper_scheme()
    second = scheme.stages[1].measurement
    for br in qstrategy.collapse_branches(paper_rho, scheme):
        assert br.measurements[1] is second


@pytest.mark.parametrize(
    "rho, swap, expected",
    [
        ("constructed", False, 1.0),
        ("product", False, 0.5),
        ("constructed", True, 0.0),
    ],
)
def test_expected_quantum_payoff(paper_rho, rho, swap, expected):
    state = paper_rho if rho == "constructed" else linalg.kron(I2 / 2, I2 / 2)
    val = qstrategy.expected_quantum_payoff(state, qstrategy.make_paper_scheme(swap), games.make_paper_game())
    assert val == pytest.approx(expected, abs=1e-12)


def test_expected_payoff_stage_mismatch(paper_rho):
    g = games.ExtensiveGame(3, ((0, 1, 2),), {k: 0 for k in ("LLL", "LLR", "LRL", "LRR", "RLL", "RLR", "RRL", "RRR")})
    with pytest.raises(games.GameError):
        qstrategy.expected_quantum_payoff(paper_rho, qstrategy.make_paper_scheme(), g)


def _random_scheme(angles_a, angles_b, order):
    scheme = qstrategy.MeasurementScheme(
        (
            qstrategy.SchemeStage(0, measures.measurement_from_angles("A", measures.BlochAngles(*angles_a)), {"n+": "L", "n-": "R"}),
            qstrategy.SchemeStage(1, measures.measurement_from_angles("B", measures.BlochAngles(*angles_b)), {"n+": "R", "n-": "L"}),
        )
    )
    return scheme.reordered(order)


_angle_pairs = [((0.3, 1.0), (2.0, 4.0)), ((1.2, 0.0), (0.1, 5.5)), ((3.0, 2.5), (1.6, 0.2))]


@given(density_matrices())
def test_collapse_matches_born(rho):
    for a, b in _angle_pairs:
        scheme = _random_scheme(a, b, (0, 1))
        seq = qstrategy.joint_action_distribution(rho, scheme)
        born = qstrategy.joint_born_distribution(rho, scheme)
        for k in PAIRS:
            assert seq[k] == pytest.approx(born[k], abs=1e-12)


@given(density_matrices())
def test_measurement_order_irrelevant(rho):
    for a, b in _angle_pairs:
        ab = qstrategy.joint_action_distribution(rho, _random_scheme(a, b, (0, 1)))
        ba = qstrategy.joint_action_distribution(rho, _random_scheme(a, b, (1, 0)))
        for k in PAIRS:
            assert ab[k] == pytest.approx(ba[k], abs=1e-12)


@given(density_matrices())
def test_no_backward_signalling(rho):
    rho_a = linalg.partial_trace(rho, "A")
    for a, b in _angle_pairs:
        scheme = _random_scheme(a, b, (0, 1))
        dist = qstrategy.joint_action_distribution(rho, scheme)
        m = scheme.stages[0].measurement
        for outcome, action in (("n+", "L"), ("n-", "R")):
            born = np.real(np.trace(m.projectors[m.labels.index(outcome)] @ rho_a))
            marginal = dist[(action, "L")] + dist[(action, "R")]
            assert marginal == pytest.approx(born, abs=1e-12)


def test_sample_zero_plays(paper_rho):
    counts = qstrategy.sample_play(paper_rho, qstrategy.make_paper_scheme(), seed=5, n=0)
    assert set(counts.values()) == {0}
    with pytest.raises(ValueError):
        qstrategy.sample_play(paper_rho, qstrategy.make_paper_scheme(), seed=5, n=-1)


@pytest.mark.parametrize("seed", [1, 2, 2**64 - 1])
def test_sample_paper_support_and_concentration(paper_rho, seed):
    n = 100_000
    start = time.perf_counter()
    counts = qstrategy.sample_play(paper_rho, qstrategy.make_paper_scheme(), seed=seed, n=n)
    assert time.perf_counter() - start < 5.0
    assert counts[("L", "L")] == 0 and counts[("R", "R")] == 0
    assert sum(counts.values()) == n
    assert abs(counts[("L", "R")] / n - 0.5) <= 3 * np.sqrt(0.25 / n)


def test_sample_deterministic(paper_rho):
    scheme = qstrategy.make_paper_scheme()
    assert qstrategy.sample_play(paper_rho, scheme, 42, 5000) == qstrategy.sample_play(paper_rho, scheme, 42, 5000)
    assert qstrategy.sample_play(paper_rho, scheme, 42, 5000) != qstrategy.sample_play(paper_rho, scheme, 43, 5000)


@settings(max_examples=5, deadline=None)
@given(density_matrices())
def test_sample_chi_square(rho):
    scheme = _random_scheme(*_angle_pairs[0], (0, 1))
    counts = qstrategy.sample_play(rho, scheme, seed=2024, n=100_000)
    dist = qstrategy.joint_action_distribution(rho, scheme)
    stat, _ = qstrategy.chi_square(counts, dist)
    assert stat < qstrategy.chi_square_quantile(3)


def test_chi_square_infinite_on_impossible_cell():
    dist = {("L", "L"): 0.0, ("L", "R"): 1.0}
    assert qstrategy.chi_square({("L", "L"): 1, ("L", "R"): 9}, dist)[0] == float("inf")


def test_chi_square_quantile_value():
    # 99.9% point of chi-square with 3 degrees of freedom
    assert qstrategy.chi_square_quantile(3) == pytest.approx(16.266, abs=1e-3)
