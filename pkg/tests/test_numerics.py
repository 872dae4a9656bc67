"""Rank and tail-probability kernels against closed forms and slow
trapezoidal-integration oracles."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from vtrkit.numerics import average_ranks, chi_square_upper_tail, student_t_two_sided


# -----------------------------------------------------------------------
# tie-averaged ranks
# -----------------------------------------------------------------------


class TestAverageRanks:
    def test_textbook_tie_case(self):
        assert average_ranks([10, 20, 20, 30]) == [1.0, 2.5, 2.5, 4.0]

    def test_singleton(self):
        assert average_ranks([7]) == [1.0]

    def test_all_tied(self):
        assert average_ranks([5, 5, 5]) == [2.0, 2.0, 2.0]

    def test_rank_sum_invariant(self):
        """Ranks of n values always sum to n(n+1)/2, ties or not."""
        rng = random.Random(7)
        for _ in range(300):
            n = rng.randint(1, 60)
            values = [rng.randint(0, 8) for _ in range(n)]  # heavy ties
            ranks = average_ranks(values)
            assert math.fsum(ranks) == n * (n + 1) / 2

    def test_ordering_consistency(self):
        rng = random.Random(8)
        values = [rng.random() for _ in range(50)]
        ranks = average_ranks(values)
        for i in range(50):
            for j in range(50):
                if values[i] < values[j]:
                    assert ranks[i] < ranks[j]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            average_ranks([])


# -----------------------------------------------------------------------
# trapezoidal integration oracles
# -----------------------------------------------------------------------

STEP = 1e-4


def chi2_upper_oracle(x: float, df: int) -> float:
    """Upper tail of chi-square by trapezoidal integration of the density.

    Left of the mode the complement is integrated in v = sqrt(s) space (the
    substitution removes the df=1 endpoint singularity); right of the mode
    the tail is integrated directly over [x, x + 400], beyond which the
    remaining mass is far below 1e-14.
    """
    if x == 0.0:
        return 1.0
    a = df / 2.0
    log_norm = -a * math.log(2.0) - math.lgamma(a)
    if x <= df + 2.0:
        top = math.sqrt(x)
        v = np.linspace(0.0, top, int(top / STEP) + 2)
        integrand = 2.0 * math.exp(log_norm) * v ** (2.0 * a - 1.0) * np.exp(-v * v / 2.0)
        return 1.0 - float(np.trapezoid(integrand, v))
    width = 400.0
    s = np.linspace(x, x + width, int(width / STEP) + 1)
    integrand = np.exp(log_norm + (a - 1.0) * np.log(s) - s / 2.0)
    return float(np.trapezoid(integrand, s))


def t_two_sided_oracle(t: float, df: int) -> float:
    """Two-sided Student t tail by trapezoidal integration.

    For small |t| the complement over [0, |t|] is integrated directly; for
    |t| >= 1 the tail is mapped onto w = t/s in (0, 1], which compactifies
    the heavy tail (essential for df = 1) with the analytic w -> 0 limit.
    """
    t = abs(t)
    if t == 0.0:
        return 1.0
    log_c = math.lgamma((df + 1) / 2.0) - math.lgamma(df / 2.0) - 0.5 * math.log(df * math.pi)
    c = math.exp(log_c)

    def pdf(s):
        return c * (1.0 + s * s / df) ** (-(df + 1) / 2.0)

    if t < 1.0:
        s = np.linspace(0.0, t, int(t / STEP) + 2)
        return 1.0 - 2.0 * float(np.trapezoid(pdf(s), s))
    w = np.linspace(0.0, 1.0, int(1.0 / STEP) + 1)
    g = np.empty_like(w)
    g[0] = c * df ** ((df + 1) / 2.0) * t ** (-df) if df == 1 else 0.0
    inner = t / w[1:]
    g[1:] = pdf(inner) * t / (w[1:] * w[1:])
    return 2.0 * float(np.trapezoid(g, w))


CHI2_GRID = [
    (x, df)
    for df in (1, 2, 3, 5, 10, 20, 50, 100)
    for x in (0.01, 0.1, 0.5, 1.0, 2.0, 3.8415, 5.0, 8.0, 12.0, 20.0, 35.0, 60.0, 100.0, 150.0, 300.0, 1000.0)
]

T_GRID = [
    (t, df)
    for df in (1, 2, 3, 5, 8, 10, 20, 50, 100, 1000)
    for t in (0.01, 0.1, 0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 4.02, 6.0, 10.0, 30.0)
]


class TestChiSquareUpperTail:
    def test_zero_statistic_is_one(self):
        for df in (1, 2, 7, 100):
            assert chi_square_upper_tail(0.0, df) == 1.0

    def test_exponential_closed_form_df2(self):
        for x in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 40.0):
            assert chi_square_upper_tail(x, 2) == pytest.approx(math.exp(-x / 2.0), abs=1e-12)

    def test_erfc_closed_form_df1(self):
        for x in (0.1, 0.5, 1.0, 3.8415, 10.0, 25.0):
            assert chi_square_upper_tail(x, 1) == pytest.approx(math.erfc(math.sqrt(x / 2.0)), abs=1e-12)

    def test_critical_value_df1(self):
        assert chi_square_upper_tail(3.8415, 1) == pytest.approx(0.05, abs=5e-5)

    def test_matches_integration_oracle(self):
        for x, df in CHI2_GRID:
            assert chi_square_upper_tail(x, df) == pytest.approx(chi2_upper_oracle(x, df), abs=1e-6)

    def test_monotone_decreasing_in_x(self):
        for df in (1, 2, 5, 30, 100):
            values = [chi_square_upper_tail(x, df) for x in np.linspace(0.0, 200.0, 250)]
            assert all(a >= b for a, b in zip(values, values[1:]))

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            chi_square_upper_tail(-1.0, 2)
        with pytest.raises(ValueError):
            chi_square_upper_tail(1.0, 0)


class TestStudentTTwoSided:
    def test_zero_t_is_one(self):
        for df in (1, 5, 100, 1000):
            assert student_t_two_sided(0.0, df) == 1.0

    def test_cauchy_closed_form_df1(self):
        for t in (0.1, 0.5, 1.0, 2.0, 10.0, 100.0):
            expected = 1.0 - 2.0 * math.atan(t) / math.pi
            assert student_t_two_sided(t, 1) == pytest.approx(expected, abs=1e-12)

    def test_cauchy_unit_point(self):
        assert student_t_two_sided(1.0, 1) == pytest.approx(0.5, abs=1e-12)

    def test_closed_form_df2(self):
        for t in (0.2, 1.0, 2.5, 8.0):
            expected = 1.0 - t / math.sqrt(t * t + 2.0)
            assert student_t_two_sided(t, 2) == pytest.approx(expected, abs=1e-12)

    def test_matches_integration_oracle(self):
        for t, df in T_GRID:
            assert student_t_two_sided(t, df) == pytest.approx(t_two_sided_oracle(t, df), abs=1e-6)

    def test_symmetry_in_t(self):
        for t in (0.3, 1.7, 4.02):
            for df in (1, 8, 200):
                assert student_t_two_sided(t, df) == student_t_two_sided(-t, df)

    def test_monotone_decreasing_in_abs_t(self):
        for df in (1, 8, 100):
            values = [student_t_two_sided(t, df) for t in np.linspace(0.0, 20.0, 200)]
            assert all(a >= b for a, b in zip(values, values[1:]))

    def test_reference_point_df8(self):
        # the worked example behind the small-sample correlation p-value
        assert student_t_two_sided(-4.02, 8) == pytest.approx(0.0039, abs=2e-4)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            student_t_two_sided(1.0, 0)
