"""Attack-calculator tests: published anchor values plus structural laws."""

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from handgate import threatmodel as tm


class TestRectGuess:
    def test_min_target_anchor(self):
        assert tm.rect_guess_probability((460, 460), (100, 100)) == pytest.approx(
            0.004688, abs=1e-6
        )

    def test_max_target_anchor(self):
        assert tm.rect_guess_probability((460, 460), (150, 150)) == pytest.approx(
            0.025304, abs=5e-6
        )

    def test_zero_target(self):
        assert tm.rect_guess_probability((460, 460), (0, 0)) == 0.0

    def test_degenerate_geometry(self):
        with pytest.raises(ValueError, match="degenerate"):
            tm.rect_guess_probability((100, 100), (100, 100))

    def test_monotone_in_target_area(self):
        probs = [
            tm.rect_guess_probability((460, 460), (s, s)) for s in range(50, 200, 10)
        ]
        assert all(b > a for a, b in zip(probs, probs[1:]))


class TestCircGuess:
    def test_radius_62_anchor(self):
        assert tm.circ_guess_probability((460, 460), 62) == pytest.approx(
            0.00693, abs=1e-4
        )

    def test_zero_radius(self):
        assert tm.circ_guess_probability((460, 460), 0) == 0.0

    def test_strictly_increasing_radius(self):
        probs = [tm.circ_guess_probability((460, 460), r) for r in range(20, 121)]
        assert all(b > a for a, b in zip(probs, probs[1:]))

    def test_equal_area_correspondence(self):
        for side in (80, 100, 110, 140):
            r = tm.equivalent_radius((side, side))
            rect = tm.rect_guess_probability((460, 460), (side, side))
            circ = tm.circ_guess_probability((460, 460), r)
            assert circ == pytest.approx(rect, abs=1e-3)

    def test_equivalent_radius_value(self):
        # sqrt(100*100/pi) = 56.419 and the published rounded figure is 62
        # only for the mid-range 110-ish target; check the formula itself.
        assert tm.equivalent_radius((100, 100)) == pytest.approx(
            math.sqrt(10_000 / math.pi)
        )


class TestBotFar:
    def test_nine_cells_two_picks(self):
        assert tm.bot_far(9, 2) == pytest.approx(0.012345679, abs=1e-9)

    def test_eight_cells_two_picks(self):
        assert tm.bot_far(8, 2) == 0.015625

    def test_unit_case(self):
        assert tm.bot_far(1, 1) == 1.0

    @given(st.integers(1, 20), st.integers(1, 6))
    @settings(max_examples=40, deadline=None)
    def test_decreasing_in_both_arguments(self, n, q):
        assert tm.bot_far(n + 1, q) < tm.bot_far(n, q) or n + 1 == 1
        assert tm.bot_far(n, q + 1) < tm.bot_far(n, q) or n == 1


class TestOnlineGuess:
    def test_full_knowledge_anchor(self):
        p_g, p_s, p_l, p_t = tm.online_guess_probability(500, 51, 1.0)
        assert p_g == pytest.approx(1e-3)
        assert p_s == pytest.approx((1.0 / 51**2) ** 2)
        assert p_l == pytest.approx(1.0 / 72)
        # exact product is 2.05299e-12; the published 2.054e-12 is rounded
        # upstream, so compare at the acceptance tolerance (rel 1e-3)
        assert p_t == pytest.approx(2.054e-12, rel=1e-3)

    def test_ten_percent_relaxation_anchor(self):
        p_g, p_s, p_l, p_t = tm.online_guess_probability(500, 51, 0.1)
        assert p_s == pytest.approx(1.48e-3, rel=1e-2)
        assert p_t == pytest.approx(2.054e-8, rel=1e-3)

    def test_minimal_case(self):
        p_g, p_s, p_l, p_t = tm.online_guess_probability(1, 1, 1.0)
        assert (p_g, p_s, p_l) == (0.5, 1.0, 1.0 / 72)
        assert p_t == pytest.approx(0.5 / 72)

    @given(
        st.integers(1, 2000),
        st.integers(1, 200),
        st.floats(0.05, 1.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_factorization_exact(self, n_g, gap, frac):
        p_g, p_s, p_l, p_t = tm.online_guess_probability(n_g, gap, frac)
        assert p_t == p_g * p_s * p_l


class TestComplexityRatio:
    def test_three_object_gap_base_two(self):
        assert tm.segmentation_complexity_ratio(9, 6, 2.0) == 8.0

    def test_equal_counts(self):
        assert tm.segmentation_complexity_ratio(5, 5, 3.7) == 1.0

    def test_limit_near_one(self):
        assert tm.segmentation_complexity_ratio(9, 6, 1 + 1e-9) == pytest.approx(
            1.0, abs=1e-6
        )

    def test_beta_bound(self):
        with pytest.raises(ValueError):
            tm.segmentation_complexity_ratio(9, 6, 1.0)


class TestSearchTime:
    def test_published_estimate(self):
        t = tm.search_time_estimate(500, 51, 72, 1e-9)
        assert t == pytest.approx(487.07, abs=2.0)
        assert t / 60 == pytest.approx(8.1, abs=0.04)

    def test_zero_cost(self):
        assert tm.search_time_estimate(500, 51, 72, 0.0) == 0.0

    def test_linear_in_cost(self):
        t1 = tm.search_time_estimate(500, 51, 72, 1e-9)
        t2 = tm.search_time_estimate(500, 51, 72, 2e-9)
        assert t2 == pytest.approx(2 * t1)


class TestSecurityReport:
    def test_bundle_consistency(self):
        rep = tm.build_security_report(p_human=0.985)
        assert rep.p_total_online == rep.p_g * rep.p_s * rep.p_l
        assert rep.far_bot == pytest.approx(1.0 / 81)
        assert rep.recognizability_gap == pytest.approx(0.985 - 1.0 / 81)
        payload = json.loads(rep.to_json())
        assert payload["p_rect"] == pytest.approx(0.004688, abs=1e-6)
        assert payload["complexity_ratio"] == 8.0

    def test_probability_validation(self):
        rep = tm.build_security_report()
        assert 0.0 <= rep.p_total_online <= 1.0
        with pytest.raises(ValueError):
            tm.SecurityReport(
                canvas=(1, 1), target=(1, 1), p_rect=2.0, p_circ=0.0,
                equivalent_radius=1.0, far_bot=0.0, p_g=0.0, p_s=0.0, p_l=0.0,
                p_total_online=0.0, complexity_ratio=1.0, search_time_seconds=0.0,
            )
