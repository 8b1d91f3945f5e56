import math

import numpy as np
import pytest

from mubtomo.fixtures import load_fixture
from mubtomo.measurement import (
    CountTable,
    EmptyBasisError,
    NoiseModel,
    ProbabilityTable,
    counts_from_dict,
    counts_to_dict,
    ideal_probabilities,
    normalize_counts,
    optical_probabilities,
    pattern_positions,
    read_table_csv,
    simulate_counts,
    single_pattern_probabilities,
    table_csv,
)
from mubtomo.mub import dim8_mub_family, prime_mub_family, prime_mub_vector
from mubtomo.optics import ApertureGeometry
from mubtomo.qudit import QuditVector

from conftest import random_mixed, random_pure

F7 = prime_mub_family(7)
G7 = ApertureGeometry(7)


def test_maximally_mixed_gives_uniform():
    p = ideal_probabilities(np.eye(7) / 7, F7)
    np.testing.assert_allclose(p.values, 1 / 7, atol=1e-15)


def test_computational_state():
    p = ideal_probabilities(QuditVector(np.eye(7)[0]), F7)
    np.testing.assert_allclose(p.values[0], np.eye(7)[0], atol=1e-15)
    np.testing.assert_allclose(p.values[1:], 1 / 7, atol=1e-12)


def test_rows_sum_to_one(rng):
    for fam in (F7, dim8_mub_family()):
        for _ in range(20):
            p = ideal_probabilities(random_pure(rng, fam.dim), fam)
            np.testing.assert_allclose(p.row_sums(), 1.0, atol=1e-12)
            q = ideal_probabilities(random_mixed(rng, fam.dim), fam)
            np.testing.assert_allclose(q.row_sums(), 1.0, atol=1e-12)


def test_probability_matches_trace_formula(rng):
    rho = random_mixed(rng, 7)
    p = ideal_probabilities(rho, F7)
    b = F7.bases[3]
    proj = b.projectors()[2]
    assert p.values[3, 2] == pytest.approx(np.trace(rho @ proj).real, abs=1e-14)


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        ideal_probabilities(np.ones(5) / math.sqrt(5), F7)


def test_optical_probabilities_agree_with_ideal(rng):
    for fam in (F7, dim8_mub_family()):
        beta = QuditVector(random_pure(rng, fam.dim))
        a = optical_probabilities(beta, fam, ApertureGeometry(fam.dim)).values
        b = ideal_probabilities(beta, fam).values
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_zero_probability_gives_zero_counts():
    p = ProbabilityTable([[1.0, 0.0], [0.5, 0.5]])
    for seed in range(50):
        c = simulate_counts(p, 1e4, 1.0, NoiseModel("poisson", seed))
        assert c.counts[0, 1] == 0


def test_poisson_moments():
    # one count per seed, 10^4 seeds; Poisson(10^4) has mean 10^4 and sd 100
    p = ProbabilityTable([[1.0]])
    draws = np.array([simulate_counts(p, 1e4, 1.0, NoiseModel("poisson", s)).counts[0, 0] for s in range(10_000)])
    assert abs(draws.mean() - 1e4) < 4.0
    assert abs(draws.std(ddof=1) - 100.0) < 5.0


def test_poisson_variance_chi_square_bound():
    p = ProbabilityTable([[0.3, 0.7]])
    n = 4000
    draws = np.array([simulate_counts(p, 100.0, 1.0, NoiseModel("poisson", s)).counts[0] for s in range(n)])
    from scipy import stats

    for j, lam in enumerate((30.0, 70.0)):
        s2 = draws[:, j].var(ddof=1)
        stat = (n - 1) * s2 / lam
        lo, hi = stats.chi2.ppf([0.00135, 0.99865], n - 1)  # 3 sigma two-sided
        assert lo < stat < hi


def test_noise_none_is_rounded_mean():
    p = ProbabilityTable([[0.5, 0.5]])
    c = simulate_counts(p, 1e4, 1.0, NoiseModel("none"))
    assert c.counts.tolist() == [[5000, 5000]]


def test_seed_determinism():
    p = ideal_probabilities(load_fixture("psi7"), F7)
    a = simulate_counts(p, 1e3, 1.0, NoiseModel("poisson", 42))
    b = simulate_counts(p, 1e3, 1.0, NoiseModel("poisson", 42))
    c = simulate_counts(p, 1e3, 1.0, NoiseModel("poisson", 43))
    np.testing.assert_array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, c.counts)


def test_simulate_rejects_nonpositive_budget():
    with pytest.raises(ValueError):
        simulate_counts(ProbabilityTable([[1.0]]), 0, 1.0)


def test_normalize_examples():
    uni = normalize_counts(CountTable([[5, 5, 5], [7, 7, 7]], 1.0, 1.0))
    np.testing.assert_allclose(uni.values, 1 / 3)
    row = normalize_counts(CountTable([[3, 1, 0]], 1.0, 1.0))
    np.testing.assert_allclose(row.values, [[0.75, 0.25, 0.0]])


def test_normalize_round_trip_within_rounding():
    rate = 1e4
    p = ideal_probabilities(load_fixture("psi7"), F7)
    back = normalize_counts(simulate_counts(p, rate, 1.0, NoiseModel("none")))
    assert np.max(np.abs(back.values - p.values)) < 1 / rate


def test_zero_row_names_alpha():
    c = CountTable([[1, 2], [0, 0]], 1.0, 1.0, alphas=(4, 7))
    with pytest.raises(EmptyBasisError, match="alpha=7") as info:
        normalize_counts(c)
    assert info.value.alpha == 7


def test_count_table_validation():
    with pytest.raises(ValueError):
        CountTable([[1.5, 2]], 1.0, 1.0)
    with pytest.raises(ValueError):
        CountTable([[-1, 2]], 1.0, 1.0)


def test_pattern_positions_phase():
    x = pattern_positions(G7)
    np.testing.assert_allclose(x * G7.fringe_scale, 2 * np.pi * np.arange(-3, 4) / 7)
    # far from the first envelope zero for a = d/4
    assert np.max(np.abs(x)) < 0.5 * G7.envelope_first_zero


@pytest.mark.parametrize("alpha", range(1, 8))
def test_single_pattern_aligned_state(alpha):
    psi = prime_mub_vector(7, alpha, 0)
    row = single_pattern_probabilities(psi, alpha, G7)
    assert np.argmax(row) == 3  # m = 0 sits at the centre position x = 0
    np.testing.assert_allclose(row, np.eye(7)[3], atol=1e-12)


def test_single_pattern_matches_direct_projection(rng):
    for dim in (3, 5, 7):
        fam = prime_mub_family(dim)
        geom = ApertureGeometry(dim)
        for _ in range(100):
            psi = QuditVector(random_pure(rng, dim))
            ideal = ideal_probabilities(psi, fam).values
            for alpha in range(1, dim + 1):
                for invert in (True, False):
                    row = single_pattern_probabilities(psi, alpha, geom, invert_labels=invert)
                    assert np.max(np.abs(row - ideal[alpha])) < 1e-8


def test_single_pattern_computational_state():
    psi = QuditVector(np.eye(7)[1])
    ideal = ideal_probabilities(psi, F7).values
    for alpha in range(1, 8):
        assert np.max(np.abs(single_pattern_probabilities(psi, alpha, G7) - ideal[alpha])) < 1e-8


def test_single_pattern_rejects_non_prime():
    with pytest.raises(ValueError, match="odd prime"):
        single_pattern_probabilities(QuditVector(np.ones(8) / math.sqrt(8)), 1, ApertureGeometry(8))


def test_csv_and_json_round_trip():
    p = ideal_probabilities(load_fixture("psi7"), F7)
    c = simulate_counts(p, 1e4, 1.0, NoiseModel("poisson", 5))
    text = table_csv(c)
    assert text.splitlines()[0] == "alpha,m,value"
    alphas, vals = read_table_csv(text)
    assert alphas == c.alphas
    np.testing.assert_array_equal(vals, c.counts)
    alphas, vals = read_table_csv(table_csv(p))
    np.testing.assert_array_equal(vals, p.values)
    again = counts_from_dict(counts_to_dict(c))
    np.testing.assert_array_equal(again.counts, c.counts)
    assert again.seed == 5 and again.mean_peak_rate == 1e4
