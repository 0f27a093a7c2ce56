import math
import random
from fractions import Fraction

import pytest
from scipy import integrate
from scipy import stats as sps

from snp.stats import (
    ContingencyTable2x2,
    DegenerateTableError,
    chi2_sf,
    fisher_exact_two_sided,
    hypergeom_pmf,
    pearson_chi2,
    survey_chi2,
)


# ---------------------------------------------------------------- oracles

def chi2_sf_quadrature(x: float, df: int) -> float:
    """Integrate the chi-square density from x to infinity."""
    a = df / 2.0

    def density(t):
        return t ** (a - 1) * math.exp(-t / 2) / (2 ** a * math.gamma(a))

    val, _ = integrate.quad(density, x, math.inf, limit=200)
    return val


def pearson_chi2_oracle(a, b, c, d):
    """Independently coded chi-square: expected counts from margins."""
    n = a + b + c + d
    rows = (a + b, c + d)
    cols = (a + c, b + d)
    obs = ((a, b), (c, d))
    stat = 0.0
    for i in range(2):
        for j in range(2):
            e = rows[i] * cols[j] / n
            stat += (obs[i][j] - e) ** 2 / e
    return stat


def fisher_oracle(a, b, c, d):
    """Exhaustive enumeration with exact rationals, built from scratch."""
    n = a + b + c + d
    row1, col1 = a + b, a + c

    def table_prob(k):
        # P(table with top-left k) given all margins
        from math import comb

        return Fraction(comb(row1, k) * comb(n - row1, col1 - k), comb(n, col1))

    k_lo = max(0, col1 - (n - row1))
    k_hi = min(row1, col1)
    p_obs = table_prob(a)
    cutoff = p_obs * (Fraction(10**7 + 1, 10**7))
    total = sum(table_prob(k) for k in range(k_lo, k_hi + 1) if table_prob(k) <= cutoff)
    return total


def hypergeom_oracle(k, N, K, n):
    def fact(x):
        out = 1
        for i in range(2, x + 1):
            out *= i
        return out

    def comb_exact(x, y):
        if y < 0 or y > x:
            return 0
        return fact(x) // (fact(y) * fact(x - y))

    return Fraction(comb_exact(K, k) * comb_exact(N - K, n - k), comb_exact(N, n))


# ---------------------------------------------------------------- chi2_sf

class TestChi2Sf:
    def test_zero_statistic_is_certain(self):
        for df in range(1, 11):
            assert chi2_sf(0, df) == 1.0

    def test_published_marginal_result(self):
        assert chi2_sf(3.19, 1) == pytest.approx(0.074, abs=0.002)

    def test_critical_value_quadrature_oracle(self):
        assert chi2_sf(3.8415, 1) == pytest.approx(chi2_sf_quadrature(3.8415, 1), abs=1e-6)
        assert chi2_sf(3.8415, 1) == pytest.approx(0.05, abs=1e-4)

    def test_matches_scipy_within_1e_10(self):
        for df in range(1, 11):
            for x in [0.001, 0.1, 0.5, 1, 2, 3.19, 5, 10, 25, 50, 77.7, 100]:
                assert abs(chi2_sf(x, df) - sps.chi2.sf(x, df)) < 1e-10, (x, df)

    def test_monotone_decreasing_in_x(self):
        for df in (1, 2, 5, 10):
            values = [chi2_sf(x / 10, df) for x in range(0, 1000, 7)]
            assert all(u >= v for u, v in zip(values, values[1:]))

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            chi2_sf(-1, 1)
        with pytest.raises(ValueError):
            chi2_sf(1, 0)
        with pytest.raises(ValueError):
            chi2_sf(1, 11)


# ---------------------------------------------------------------- pearson

class TestPearsonChi2:
    def test_conditional_finalist_table(self):
        r = pearson_chi2(ContingencyTable2x2(16, 41, 228, 999))
        assert r.statistic == pytest.approx(3.19, abs=0.01)
        assert r.p_value == pytest.approx(0.074, abs=0.002)
        assert r.df == 1 and r.method == "pearson_chi2"

    def test_perfect_independence(self):
        r = pearson_chi2(ContingencyTable2x2(10, 10, 10, 10))
        assert r.statistic == 0
        assert r.p_value == 1.0

    def test_zero_margin_rejected(self):
        with pytest.raises(DegenerateTableError):
            pearson_chi2(ContingencyTable2x2(0, 0, 5, 5))

    def test_no_continuity_correction(self):
        # with Yates' correction the marginal table drops to ~2.7; the
        # uncorrected statistic is the published one
        r = pearson_chi2(ContingencyTable2x2(16, 41, 228, 999))
        assert r.statistic > 3.0

    def test_large_membership_table_matches_oracle(self):
        r = pearson_chi2(ContingencyTable2x2(57, 294, 1227, 76812))
        assert r.statistic == pytest.approx(pearson_chi2_oracle(57, 294, 1227, 76812), rel=1e-12)
        assert r.statistic > 100  # far beyond the 3.84 critical value
        assert r.p_value < 0.001

    def test_random_tables_match_independent_oracle(self):
        rng = random.Random(42)
        for _ in range(1000):
            cells = [rng.randrange(1, 500) for _ in range(4)]
            r = pearson_chi2(ContingencyTable2x2(*cells))
            oracle = pearson_chi2_oracle(*cells)
            assert r.statistic == pytest.approx(oracle, rel=1e-9)

    def test_negative_or_fractional_cells_rejected(self):
        with pytest.raises(ValueError):
            ContingencyTable2x2(-1, 2, 3, 4)
        with pytest.raises(ValueError):
            ContingencyTable2x2(1.5, 2, 3, 4)


# ---------------------------------------------------------------- hypergeom

class TestHypergeomPmf:
    def test_tiny_case(self):
        assert hypergeom_pmf(1, 2, 1, 1) == pytest.approx(0.5)

    def test_support_sums_to_one(self):
        total = sum(hypergeom_pmf(k, 100, 30, 20) for k in range(0, 21))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_exact_rational_oracle(self):
        assert hypergeom_pmf(5, 50, 10, 25) == pytest.approx(
            float(hypergeom_oracle(5, 50, 10, 25)), rel=1e-14
        )

    def test_out_of_support_is_zero(self):
        assert hypergeom_pmf(11, 50, 10, 25) == 0.0
        assert hypergeom_pmf(-1, 50, 10, 25) == 0.0
        # lower support edge: k >= n + K - N
        assert hypergeom_pmf(0, 10, 8, 5) == 0.0

    def test_bad_parameters_rejected(self):
        with pytest.raises(ValueError):
            hypergeom_pmf(1, 10, 11, 5)


# ---------------------------------------------------------------- fisher

class TestFisherExact:
    def test_direct_vs_indirect_authors(self):
        r = fisher_exact_two_sided(ContingencyTable2x2(52, 257, 5, 37))
        assert r.p_value == pytest.approx(0.509, abs=0.005)

    def test_finalists_among_authors(self):
        r = fisher_exact_two_sided(ContingencyTable2x2(13, 39, 3, 2))
        assert r.p_value == pytest.approx(0.129, abs=0.005)

    def test_symmetric_two_by_two(self):
        r = fisher_exact_two_sided(ContingencyTable2x2(1, 0, 0, 1))
        assert r.p_value == pytest.approx(1.0)

    def test_statistic_absent(self):
        r = fisher_exact_two_sided(ContingencyTable2x2(5, 5, 5, 5))
        assert r.statistic is None
        assert r.method == "fisher_exact_two_sided"

    def test_matches_scipy(self):
        rng = random.Random(3)
        for _ in range(200):
            cells = [rng.randrange(0, 40) for _ in range(4)]
            if sum(cells) == 0:
                continue
            ours = fisher_exact_two_sided(ContingencyTable2x2(*cells)).p_value
            _, theirs = sps.fisher_exact(
                [[cells[0], cells[1]], [cells[2], cells[3]]], alternative="two-sided"
            )
            assert ours == pytest.approx(theirs, abs=1e-9), cells

    def test_exhaustive_oracle_on_random_tables(self):
        rng = random.Random(8)
        for _ in range(200):
            n = rng.randrange(4, 201)
            a = rng.randrange(0, n + 1)
            b = rng.randrange(0, n - a + 1)
            c = rng.randrange(0, n - a - b + 1)
            d = n - a - b - c
            ours = fisher_exact_two_sided(ContingencyTable2x2(a, b, c, d)).p_value
            oracle = float(min(fisher_oracle(a, b, c, d), Fraction(1)))
            assert ours == pytest.approx(oracle, abs=1e-12), (a, b, c, d)

    def test_large_n_stays_exact(self):
        r = fisher_exact_two_sided(ContingencyTable2x2(60, 4940, 40, 4960))
        _, scipy_p = sps.fisher_exact([[60, 4940], [40, 4960]])
        assert r.p_value == pytest.approx(scipy_p, rel=1e-9)

    def test_direction_agreement_with_chi2(self):
        # sanity coupling: with expected counts all >= 5 and moderate table
        # sizes the two p-values rarely differ by much (at very small N
        # Fisher's conservatism dominates and the gap widens)
        rng = random.Random(77)
        generated = 0
        close = 0
        while generated < 1000:
            cells = [rng.randrange(10, 200) for _ in range(4)]
            t = ContingencyTable2x2(*cells)
            n = t.n
            expected = [
                t.row1 * t.col1 / n, t.row1 * t.col2 / n,
                t.row2 * t.col1 / n, t.row2 * t.col2 / n,
            ]
            if min(expected) < 5:
                continue
            generated += 1
            p_chi = pearson_chi2(t).p_value
            p_fish = fisher_exact_two_sided(t).p_value
            if abs(p_chi - p_fish) < 0.05:
                close += 1
        assert close >= 950


# ---------------------------------------------------------------- survey

class TestSurveyChi2:
    def test_reconstructed_counts(self):
        r = survey_chi2((44, 55), (1364, 2552))
        assert 14.5 <= r.statistic <= 16.5
        assert r.p_value < 0.001

    def test_equal_proportions_near_zero(self):
        r = survey_chi2((50, 100), (500, 1000))
        assert r.statistic == pytest.approx(0.0, abs=1e-12)

    def test_delegates_to_pearson(self):
        direct = pearson_chi2(ContingencyTable2x2(44, 11, 1364, 1188))
        via = survey_chi2((44, 55), (1364, 2552))
        assert via == direct

    def test_hits_beyond_total_rejected(self):
        with pytest.raises(ValueError):
            survey_chi2((56, 55), (10, 20))
