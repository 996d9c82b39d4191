import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from femtoflow import markov
from femtoflow.exceptions import DegenerateSplitError, InvalidChannelSplitError, NonFiniteRateError

pf = markov.stationary_product_form
direct = markov.stationary_direct_solve


def test_enumeration_default_split():
    assert markov.enumerate_states(3, 1) == [
        (0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1), (3, 0)
    ]
    assert markov.enumerate_states(1, 0) == [(0, 0), (1, 0)]
    assert len(markov.enumerate_states(6, 3)) == 22


@pytest.mark.parametrize("n_f", range(13))
def test_state_count_formula(n_f):
    for n_f_o in range(n_f + 1):
        assert markov.state_count(n_f, n_f_o) == len(markov.enumerate_states(n_f, n_f_o))


def test_bad_split():
    with pytest.raises(InvalidChannelSplitError):
        markov.enumerate_states(2, 3)


def test_unit_load_single_channel():
    d = pf(1.0, 1.0, 1.0, 1.0, 1, 0)
    assert d[(0, 0)] == pytest.approx(0.5) and d[(1, 0)] == pytest.approx(0.5)
    assert markov.blocking_femto_user(d) == pytest.approx(0.5)
    assert markov.blocking_macro_user_in_femto(d) == 1.0
    assert markov.occupancy_closed(d) == pytest.approx(0.5)


def test_single_open_channel():
    for d in (pf(1, 1, 1, 1, 1, 1), direct(1, 1, 1, 1, 1, 1)):
        for s in [(0, 0), (1, 0), (0, 1)]:
            assert d[s] == pytest.approx(1 / 3, abs=1e-12)
        assert markov.blocking_femto_user(d) == pytest.approx(2 / 3, abs=1e-12)
        assert markov.blocking_macro_user_in_femto(d) == pytest.approx(2 / 3, abs=1e-12)


def test_birth_death_balance():
    d = direct(2.0, 1.0, 1.0, 1.0, 1, 0)
    assert d[(1, 0)] == pytest.approx(2 / 3, abs=1e-12)


def test_uniform_rates_two_open():
    w = {(0, 0): 1, (1, 0): 1, (0, 1): 1, (2, 0): 0.5, (1, 1): 1, (0, 2): 0.5}
    # (1,1) has weight rho1*rho2 = 1; the listed 1/2 entries are the squares.
    z = sum(w.values())
    for d in (pf(1, 1, 1, 1, 2, 2), direct(1, 1, 1, 1, 2, 2)):
        for s, v in w.items():
            assert d[s] == pytest.approx(v / z, abs=1e-12)


def test_default_derived_rates_agree(base_params):
    from femtoflow import solve

    r = solve(base_params).rates
    a = pf(r.lambda_1, r.lambda_2, r.mu_1, r.mu_2, 3, 1)
    b = direct(r.lambda_1, r.lambda_2, r.mu_1, r.mu_2, 3, 1)
    assert np.max(np.abs(a.probabilities - b.probabilities)) < 1e-12
    p_fu, p_mu = markov.blocking_femto_user(b), markov.blocking_macro_user_in_femto(b)
    assert p_fu < p_mu < 1


@settings(max_examples=200, deadline=None)
@given(
    st.integers(0, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))),
    st.tuples(*[st.floats(1e-3, 1e3) for _ in range(4)]),
)
def test_product_form_matches_direct_solve(split, rates):
    n_f, n_f_o = split
    a = pf(*rates, n_f, n_f_o)
    b = direct(*rates, n_f, n_f_o)
    assert np.max(np.abs(a.probabilities - b.probabilities)) < 1e-10
    assert abs(a.probabilities.sum() - 1) < 1e-12


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 10).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))),
    st.tuples(*[st.floats(1e-3, 1e3) for _ in range(4)]),
)
def test_femto_blocking_below_macro_blocking(split, rates):
    n_f, n_f_o = split
    d = pf(*rates, n_f, n_f_o)
    p_fu, p_mu = markov.blocking_femto_user(d), markov.blocking_macro_user_in_femto(d)
    assert p_fu <= p_mu + 1e-15
    if n_f_o == n_f:
        assert p_fu == pytest.approx(p_mu, abs=1e-15)


def test_femto_blocking_monotone_in_load():
    for n_f, n_f_o in [(3, 1), (6, 3), (4, 4)]:
        vals = [markov.blocking_femto_user(pf(l1, 0.7, 1.0, 1.0, n_f, n_f_o))
                for l1 in np.linspace(0.05, 20, 60)]
        assert np.all(np.diff(vals) >= 0)


def _literal_closed(d):
    n, o = d.n_f, d.n_f_o
    c = n - o
    total = 0.0
    for i in range(1, c + 1):
        for j in range(o + 1):
            total += math.comb(c - 1, i - 1) / math.comb(c, i) * d.get((i, j))
    for i in range(c + 1, n + 1):
        for j in range(n - i + 1):
            total += d.get((i, j))
    return total


def _literal_open(d):
    n, o = d.n_f, d.n_f_o
    c = n - o
    total = 0.0
    for i in range(c + 1):
        for j in range(1, o + 1):
            total += math.comb(o - 1, j - 1) / math.comb(o, j) * d.get((i, j))
    for i in range(c + 1, n + 1):
        k = i - c
        for j in range(n - i + 1):
            total += math.comb(o - 1, k - 1) / math.comb(o, k) * d.get((i, j))
    return total


def test_binomial_ratio_identity():
    for n in range(1, 13):
        for k in range(1, n + 1):
            assert math.comb(n - 1, k - 1) / math.comb(n, k) == pytest.approx(k / n, rel=1e-15)


@settings(max_examples=150, deadline=None)
@given(
    st.integers(2, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1))),
    st.tuples(*[st.floats(1e-2, 1e2) for _ in range(4)]),
)
def test_occupancy_matches_literal_sums(split, rates):
    d = pf(*rates, *split)
    assert markov.occupancy_closed(d) == pytest.approx(_literal_closed(d), abs=1e-12)
    assert markov.occupancy_open(d) == pytest.approx(_literal_open(d), abs=1e-12)


def test_occupancy_small_example():
    # rho1 = rho2 = 1 on (2, 1): weights 1,1,1,1,1/2 over (0,0),(0,1),(1,0),(1,1),(2,0).
    d = pf(1, 1, 1, 1, 2, 1)
    assert markov.occupancy_closed(d) == pytest.approx(2.5 / 4.5)
    assert markov.occupancy_open(d) == pytest.approx(2.5 / 4.5)


def test_closed_channels_busier_at_symmetric_load():
    d = direct(1, 1, 1, 1, 6, 3)
    assert markov.occupancy_closed(d) >= markov.occupancy_open(d)


def test_degenerate_occupancy():
    with pytest.raises(DegenerateSplitError):
        markov.occupancy_open(pf(1, 1, 1, 1, 3, 0))
    with pytest.raises(DegenerateSplitError):
        markov.occupancy_closed(pf(1, 1, 1, 1, 3, 3))


def test_zero_rate_rejected():
    with pytest.raises(NonFiniteRateError):
        pf(0.0, 1, 1, 1, 2, 1)
    with pytest.raises(NonFiniteRateError):
        pf(float("nan"), 1, 1, 1, 2, 1)


def test_large_loads_do_not_overflow():
    d = pf(1e6, 1e-6, 1.0, 1.0, 16, 8)
    assert np.isfinite(d.probabilities).all()
    assert d[(16, 0)] > 0.99


def test_distribution_is_read_only():
    d = pf(1, 1, 1, 1, 2, 1)
    with pytest.raises(ValueError):
        d.probabilities[0] = 1.0
    assert sum(d.as_dict().values()) == pytest.approx(1.0)
    assert d.mean_occupied() == pytest.approx(float(np.dot(d.i + d.j, d.probabilities)))
