from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnetfid import (
    TRIANGLE_AVERAGE_THEN_MAX,
    TRIANGLE_MAX_THEN_AVERAGE,
    TopologySpec,
    average_max_fidelity,
    chain_uniform,
    chain_with_me,
    complete_uniform,
    flower_uniform,
    flower_with_me,
    generate,
    me_value,
    path_fidelity_term,
    ring_uniform,
    star_uniform,
    star_with_me,
    uniform_value,
)
from qnetfid.analytic import star_me_limit
from qnetfid.network import MEPlacement
from qnetfid.scenarios import run_scenario_B

HALF = Fraction(1, 2)
PS = (0.1, 0.5, 0.9)


class TestExactRationalMode:
    def test_table_values(self):
        assert chain_uniform(4, HALF) == Fraction(65, 96)
        assert star_uniform(4, HALF) == Fraction(66, 96)
        assert ring_uniform(4, HALF) == Fraction(66, 96)
        assert complete_uniform(HALF) == Fraction(72, 96)

    def test_double_mode_close(self):
        assert chain_uniform(4, 0.5) == pytest.approx(65 / 96, abs=1e-12)
        assert star_uniform(4, 0.5) == pytest.approx(66 / 96, abs=1e-12)

    def test_term(self):
        assert path_fidelity_term(0, HALF) == 1
        assert path_fidelity_term(3, HALF) == Fraction(9, 16)
        assert path_fidelity_term(2, 0.5) == 0.625

    def test_int_p_is_exact(self):
        assert star_uniform(7, 1) == 1
        assert chain_uniform(9, 0) == HALF


class TestUniformForms:
    def test_flower_example_form(self):
        # (5 F1 + 7 F2 + 3 F3) / 15 on six nodes with k = 2
        for p in (Fraction(1, 3), Fraction(7, 10)):
            expected = (
                5 * path_fidelity_term(1, p)
                + 7 * path_fidelity_term(2, p)
                + 3 * path_fidelity_term(3, p)
            ) / 15
            assert flower_uniform(6, 2, p) == expected

    @pytest.mark.parametrize("n", range(3, 13))
    def test_flower_reductions(self, n):
        for p in PS:
            assert flower_uniform(n, 0, p) == pytest.approx(chain_uniform(n, p), abs=1e-12)
            assert flower_uniform(n, n - 3, p) == pytest.approx(star_uniform(n, p), abs=1e-12)
        assert flower_uniform(n, 0, HALF) == chain_uniform(n, HALF)
        assert flower_uniform(n, n - 3, HALF) == star_uniform(n, HALF)

    def test_ring_small(self):
        assert ring_uniform(3, HALF) == path_fidelity_term(1, HALF)
        assert ring_uniform(4, HALF) == (
            path_fidelity_term(1, HALF) + path_fidelity_term(2, HALF)
        ) / 2

    def test_boundaries(self):
        for n in (2, 5, 9):
            assert star_uniform(n, 1.0) == 1.0
            assert chain_uniform(n, 1.0) == 1.0
            assert star_uniform(n, 0.0) == 0.5
            assert chain_uniform(n, 0.0) == 0.5
        assert ring_uniform(6, 1.0) == 1.0
        assert complete_uniform(1.0) == 1.0

    def test_ordering_chain_to_star(self):
        for p in PS:
            values = [chain_uniform(7, p)]
            values += [flower_uniform(7, k, p) for k in (1, 2, 3)]
            values.append(star_uniform(7, p))
            assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))

    def test_derivative_is_mean_path_length(self):
        n, h = 9, 1e-6
        mean_path = sum((n - l) * l for l in range(1, n)) / comb(n, 2)
        fd = 2 * (chain_uniform(n, 1.0) - chain_uniform(n, 1.0 - h)) / h
        assert fd == pytest.approx(mean_path, abs=1e-4)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            star_uniform(4, 1.5)
        with pytest.raises(ValueError):
            chain_uniform(1, 0.5)
        with pytest.raises(ValueError):
            ring_uniform(2, 0.5)
        with pytest.raises(ValueError):
            flower_uniform(6, 4, 0.5)


class TestMEForms:
    def test_star_example(self):
        assert star_with_me(4, 1, HALF) == Fraction(37, 48)  # 4.625 / 6
        assert star_with_me(4, 1, 0.5) == pytest.approx(float(Fraction(37, 48)), abs=1e-15)

    def test_chain_example(self):
        assert chain_with_me(4, 1, HALF) == Fraction(109, 144)  # 0.7569444...

    @pytest.mark.parametrize("n", range(2, 9))
    def test_zero_me_reduces_to_uniform(self, n):
        for p in PS:
            assert star_with_me(n, 0, p) == pytest.approx(star_uniform(n, p), abs=1e-14)
            assert chain_with_me(n, 0, p) == pytest.approx(chain_uniform(n, p), abs=1e-14)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_all_me_is_exactly_one(self, n):
        assert star_with_me(n, n - 1, 0.5) == 1.0
        assert chain_with_me(n, n - 1, 0.5) == 1.0
        assert chain_with_me(n, n - 1, HALF) == 1

    @pytest.mark.parametrize("n,k", [(5, 1), (6, 2), (7, 3), (8, 1)])
    def test_flower_reduces(self, n, k):
        links = n - 1
        for m in range(links + 1):
            assert flower_with_me(n, n - 3, m, HALF) == star_with_me(n, m, HALF)
        assert flower_with_me(n, k, 0, HALF) == flower_uniform(n, k, HALF)

    def test_flower_placement_oracle(self):
        # mean over the 10 explicit placements of 2 ME links on flower(6, 2)
        spec = TopologySpec.flower(6, 2)
        est = run_scenario_B(spec, 0.5, 2, mode="exhaustive")
        assert flower_with_me(6, 2, 2, 0.5) == pytest.approx(est.mean, abs=1e-10)

    def test_chain_placement_oracle(self):
        est = run_scenario_B(TopologySpec.chain(10), 0.5, 6, mode="exhaustive")
        assert est.sample_count == comb(9, 6)
        assert chain_with_me(10, 6, 0.5) == pytest.approx(est.mean, abs=1e-10)

    def test_m_range_errors(self):
        with pytest.raises(ValueError):
            star_with_me(4, 4, 0.5)
        with pytest.raises(ValueError):
            chain_with_me(4, -1, 0.5)
        with pytest.raises(ValueError):
            flower_with_me(6, 2, 6, 0.5)


class TestEngineAgreement:
    @pytest.mark.parametrize("family,n,k", [
        ("chain", 4, None), ("chain", 10, None),
        ("star", 4, None), ("star", 10, None),
        ("flower", 7, 2), ("flower", 10, 4),
        ("ring", 5, None), ("ring", 8, None), ("ring", 10, None),
        ("complete", 4, None), ("complete", 6, None),
    ])
    def test_uniform_vs_engine(self, family, n, k):
        for p in PS:
            spec = TopologySpec(family, n, k=k)
            engine = average_max_fidelity(generate(spec, p)).avg_max_fidelity
            assert float(uniform_value(family, n, k, p)) == pytest.approx(engine, abs=1e-10)

    def test_chain_long_matches_engine(self):
        engine = average_max_fidelity(generate(TopologySpec.chain(100), 0.5)).avg_max_fidelity
        assert chain_uniform(100, 0.5) == pytest.approx(engine, abs=1e-12)

    def test_me_value_dispatch(self):
        assert me_value("chain", 6, None, 2, 0.5) == chain_with_me(6, 2, 0.5)
        assert me_value("flower", 6, 2, 1, 0.5) == flower_with_me(6, 2, 1, 0.5)


class TestTriangleConstants:
    def test_values(self):
        assert TRIANGLE_MAX_THEN_AVERAGE == Fraction(7, 9)
        assert TRIANGLE_AVERAGE_THEN_MAX == Fraction(3, 4)
        assert TRIANGLE_MAX_THEN_AVERAGE > TRIANGLE_AVERAGE_THEN_MAX


class TestFloatVsRational:
    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(2, 12),
        m_frac=st.fractions(0, 1),
        p_numer=st.integers(0, 32),
    )
    def test_chain_me_consistency(self, n, m_frac, p_numer):
        m_links = round(m_frac * (n - 1))
        p = Fraction(p_numer, 32)
        exact = chain_with_me(n, m_links, p)
        assert Fraction(1, 2) <= exact <= 1
        assert chain_with_me(n, m_links, float(p)) == pytest.approx(float(exact), abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(3, 12), data=st.data())
    def test_flower_me_consistency(self, n, data):
        k = data.draw(st.integers(0, n - 3))
        m_links = data.draw(st.integers(0, n - 1))
        p = Fraction(data.draw(st.integers(0, 16)), 16)
        exact = flower_with_me(n, k, m_links, p)
        assert Fraction(1, 2) <= exact <= 1
        assert flower_with_me(n, k, m_links, float(p)) == pytest.approx(float(exact), abs=1e-12)


def test_star_limit_matches_large_star():
    for p in (0.5, 0.9):
        for m in (0.0, 0.5):
            n = 4001
            m_links = round(m * (n - 1))
            limit = float(star_me_limit(m, p))
            assert star_with_me(n, m_links, p) == pytest.approx(limit, abs=5.0 / n)


def test_star_placement_invariance_against_engine():
    # every explicit placement of a star equals the closed form exactly
    spec = TopologySpec.star(6)
    for m in range(6):
        expected = float(star_with_me(6, m, 0.3))
        for start in range(0, 5 - m + 1):
            placement = MEPlacement(tuple(range(start, start + m)), 0.3)
            engine = average_max_fidelity(generate(spec, placement)).avg_max_fidelity
            assert engine == pytest.approx(expected, abs=1e-12)
