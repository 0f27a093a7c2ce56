"""Contingency-table significance tests for 2x2 count data.

pearson_chi2 is the uncorrected statistic (no Yates continuity
correction); fisher_exact_two_sided sums hypergeometric point
probabilities in exact integer arithmetic, so results are reliable for
table totals into the tens of thousands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional


class DegenerateTableError(ValueError):
    pass


@dataclass(frozen=True)
class ContingencyTable2x2:
    """Observed counts; row 1 is the group of interest, column 1 the outcome."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"cell {name} must be a nonnegative integer, got {v!r}")
        if self.n == 0:
            raise DegenerateTableError("empty table")

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    @property
    def row1(self) -> int:
        return self.a + self.b

    @property
    def row2(self) -> int:
        return self.c + self.d

    @property
    def col1(self) -> int:
        return self.a + self.c

    @property
    def col2(self) -> int:
        return self.b + self.d

    def cells(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class TestResult:
    method: str
    p_value: float
    statistic: Optional[float] = None
    df: Optional[int] = None
    table: Optional[tuple[int, int, int, int]] = None

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "p_value": self.p_value,
            "statistic": self.statistic,
            "df": self.df,
            "table": list(self.table) if self.table else None,
        }


def chi2_sf(x: float, df: int) -> float:
    """P(chi2_df >= x) via the regularized upper incomplete gamma Q(df/2, x/2).

    Built up from the closed forms Q(1/2, y) = erfc(sqrt(y)) and
    Q(1, y) = exp(-y) with the one-step recurrence
    Q(a+1, y) = Q(a, y) + y^a e^-y / Gamma(a+1).
    """
    if x < 0:
        raise ValueError("chi-square statistic must be nonnegative")
    if not isinstance(df, int) or not 1 <= df <= 10:
        raise ValueError("df must be an integer in 1..10")
    if x == 0:
        return 1.0
    y = x / 2.0
    if df % 2:
        q = math.erfc(math.sqrt(y))
        a = 0.5
    else:
        q = math.exp(-y)
        a = 1.0
    target = df / 2.0
    while a < target - 1e-9:
        q += math.exp(a * math.log(y) - y - math.lgamma(a + 1.0))
        a += 1.0
    return min(max(q, 0.0), 1.0)


def pearson_chi2(t: ContingencyTable2x2) -> TestResult:
    """Uncorrected Pearson chi-square on a 2x2 table, df = 1."""
    if min(t.row1, t.row2, t.col1, t.col2) == 0:
        raise DegenerateTableError("zero margin: expected counts are not all positive")
    n = t.n
    stat = 0.0
    for obs, row, col in (
        (t.a, t.row1, t.col1),
        (t.b, t.row1, t.col2),
        (t.c, t.row2, t.col1),
        (t.d, t.row2, t.col2),
    ):
        expected = row * col / n
        stat += (obs - expected) ** 2 / expected
    return TestResult(
        method="pearson_chi2",
        statistic=stat,
        df=1,
        p_value=chi2_sf(stat, 1),
        table=t.cells(),
    )


def hypergeom_pmf(k: int, N: int, K: int, n: int) -> float:
    """P(X = k) for X ~ Hypergeometric(N, K, n); 0 outside the support."""
    if N < 0 or not 0 <= K <= N or not 0 <= n <= N:
        raise ValueError(f"invalid hypergeometric parameters N={N}, K={K}, n={n}")
    if k < max(0, n + K - N) or k > min(K, n):
        return 0.0
    return float(Fraction(math.comb(K, k) * math.comb(N - K, n - k), math.comb(N, n)))


# Tables whose point probability exceeds the observed one by at most this
# relative slack still count toward the two-sided sum, absorbing ties that
# exact arithmetic would otherwise split on representation noise.
_FISHER_SLACK_NUM = 10**7 + 1
_FISHER_SLACK_DEN = 10**7


def fisher_exact_two_sided(t: ContingencyTable2x2) -> TestResult:
    """Two-sided Fisher's exact test by the point-probability rule.

    Sums P(table) over all tables with the observed margins whose point
    probability is <= the observed table's (within the tie slack). All
    arithmetic is exact integers until the final division.
    """
    N, K, n = t.n, t.row1, t.col1
    k_obs = t.a
    k_min = max(0, n + K - N)
    k_max = min(K, n)

    weights = [math.comb(K, k) * math.comb(N - K, n - k) for k in range(k_min, k_max + 1)]
    observed = weights[k_obs - k_min]
    tail = sum(
        w for w in weights if w * _FISHER_SLACK_DEN <= observed * _FISHER_SLACK_NUM
    )
    p = Fraction(tail, math.comb(N, n))
    return TestResult(
        method="fisher_exact_two_sided",
        p_value=float(min(p, Fraction(1))),
        table=t.cells(),
    )


def survey_chi2(
    recruits: tuple[int, int], others: tuple[int, int]
) -> TestResult:
    """Chi-square on (hits, total) pairs, e.g. respondents living abroad."""
    r_hit, r_total = recruits
    o_hit, o_total = others
    if r_hit > r_total or o_hit > o_total:
        raise ValueError("hits cannot exceed totals")
    table = ContingencyTable2x2(r_hit, r_total - r_hit, o_hit, o_total - o_hit)
    return pearson_chi2(table)
