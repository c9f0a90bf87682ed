import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from peasim.stats import holm_bonferroni, mann_whitney_u, quantiles


def enumeration_pvalue(a: list[float], b: list[float], alternative: str) -> float:
    """Independent oracle: exact p by enumerating every assignment of the
    pooled values into the two groups."""
    pooled = sorted(a + b)
    n, m = len(a), len(b)

    def u_of(selection: tuple[int, ...]) -> float:
        ranks = []
        i = 0
        while i < len(pooled):
            j = i
            while j + 1 < len(pooled) and pooled[j + 1] == pooled[i]:
                j += 1
            ranks.extend([(i + j) / 2 + 1] * (j - i + 1))
            i = j + 1
        r = sum(ranks[k] for k in selection)
        return r - n * (n + 1) / 2

    # observed U for group a: pooled indices of a's values (stable pairing)
    taken = []
    used = [False] * len(pooled)
    for v in a:
        for idx, w in enumerate(pooled):
            if w == v and not used[idx]:
                taken.append(idx)
                used[idx] = True
                break
    u_obs = u_of(tuple(taken))
    total = 0
    hits = 0
    for selection in itertools.combinations(range(n + m), n):
        u = u_of(selection)
        total += 1
        if alternative == "less":
            hits += u <= u_obs
        elif alternative == "greater":
            hits += u >= u_obs
        else:
            mid = n * m / 2
            hits += abs(u - mid) >= abs(u_obs - mid)
    return hits / total


class TestMannWhitney:
    def test_identical_samples(self):
        u, p = mann_whitney_u([1, 2, 3], [1, 2, 3])
        assert u == 4.5
        assert p == pytest.approx(1.0, abs=0.05)

    def test_fully_separated_exact(self):
        u, p = mann_whitney_u([1, 2, 3], [10, 11, 12])
        assert u == 0.0
        assert p == pytest.approx(0.1)

    def test_reference_point_u224_at_20_vs_20(self):
        # tie-free samples of 20 engineered so that U = 224; the two-sided
        # p lands near 0.52
        b = [float(j) for j in range(20)]
        a = [20.1 + i for i in range(11)]  # each beats all 20 of b
        a += [3.5]  # beats exactly 4
        a += [-1.0 - i for i in range(8)]  # beat none
        u, p = mann_whitney_u(a, b)
        assert u == 224.0
        assert p == pytest.approx(0.52, abs=0.01)

    def test_one_sided_directions(self):
        small = [1.0, 2.0, 3.0, 4.0]
        large = [10.0, 11.0, 12.0, 13.0]
        _, p_less = mann_whitney_u(small, large, alternative="less")
        _, p_greater = mann_whitney_u(small, large, alternative="greater")
        assert p_less < 0.05
        assert p_greater > 0.9

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            mann_whitney_u([], [1.0])

    @pytest.mark.parametrize("n,m", [(2, 2), (3, 3), (4, 3), (5, 4), (6, 6), (2, 6)])
    def test_matches_enumeration_oracle_no_ties(self, n, m):
        # distinct values so the exact path is exercised
        import random

        rnd = random.Random(n * 100 + m)
        values = rnd.sample(range(1000), n + m)
        a = [float(v) for v in values[:n]]
        b = [float(v) for v in values[n:]]
        for alternative in ("two-sided", "less", "greater"):
            _, p = mann_whitney_u(a, b, alternative)
            oracle = enumeration_pvalue(a, b, alternative)
            assert p == pytest.approx(oracle, abs=1e-12), (a, b, alternative)

    def test_two_sided_caps_at_one(self):
        _, p = mann_whitney_u([1.0, 4.0], [2.0, 3.0])
        assert p <= 1.0


class TestHolmBonferroni:
    def test_both_rejected(self):
        assert holm_bonferroni([0.01, 0.04], 0.05) == [True, True]

    def test_none_rejected_stops_at_first(self):
        assert holm_bonferroni([0.03, 0.04], 0.05) == [False, False]

    def test_empty(self):
        assert holm_bonferroni([], 0.05) == []

    def test_order_preserved(self):
        assert holm_bonferroni([0.04, 0.01], 0.05) == [True, True]
        assert holm_bonferroni([0.9, 0.001], 0.05) == [False, True]

    def test_stop_blocks_later_small_enough_values(self):
        # 0.03 > 0.05/3 stops the procedure even though 0.04 < 0.05
        assert holm_bonferroni([0.03, 0.04, 0.9], 0.05) == [False, False, False]

    def test_rejects_bad_pvalues(self):
        with pytest.raises(ValueError):
            holm_bonferroni([1.5], 0.05)

    @given(st.lists(st.floats(0, 1), max_size=8), st.floats(0.01, 0.2))
    def test_monotone_in_sorted_order(self, ps, alpha):
        decisions = holm_bonferroni(ps, alpha)
        ranked = sorted(zip(ps, decisions))
        seen_false = False
        for _, d in ranked:
            if not d:
                seen_false = True
            # after the first non-rejection no rejection may follow
            assert not (seen_false and d)


class TestQuantiles:
    def test_even_count_median_is_midpoint(self):
        q25, med, q75 = quantiles([1, 2, 3, 4])
        assert med == 2.5

    def test_odd_count(self):
        assert quantiles([1, 2, 3])[1] == 2.0

    def test_quartiles(self):
        q25, med, q75 = quantiles([1, 2, 3, 4])
        assert (q25, q75) == (1.5, 3.5)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            quantiles([])
