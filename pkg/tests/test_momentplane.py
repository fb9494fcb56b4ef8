import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loadlens.errors import (
    AllWindowsDegenerate,
    DegenerateMoments,
    NonPositiveShape,
    TooFewPoints,
)
from loadlens.momentplane import (
    PlanePoint,
    Trajectory,
    Zone,
    classify_zone,
    curvature_profile,
    default_landmarks,
    export_plane,
    metric1,
    metric2,
    metric_series,
    to_plane,
    trajectory_from_windows,
    weibull_landmark,
)
from loadlens.stats import Moments, SampleWindow, bootstrap, moments


def window_at(t, mean=0.0, std=1.0, skew=0.0, kurt=3.0, degenerate=False):
    m = Moments(300, mean, std, math.nan if degenerate else skew, math.nan if degenerate else kurt)
    return SampleWindow(0, 300, t - 150, t + 150, m, degenerate=degenerate)


class TestToPlane:
    def test_normal_landmark(self):
        p = to_plane(Moments(100, 0.0, 1.0, 0.0, 3.0), t_mid_ms=5)
        assert (p.s, p.k, p.t_mid_ms) == (0.0, 3.0, 5)

    def test_squaring_kills_sign(self):
        p = to_plane(Moments(100, 0.0, 1.0, -2.0, 9.0))
        assert (p.s, p.k) == (4.0, 9.0)

    def test_uniform_draws_near_landmark(self):
        x = np.random.default_rng(0).uniform(0, 1, 10_000)
        p = to_plane(moments(x))
        assert math.hypot(p.s, p.k - 1.8) < 0.1

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateMoments):
            to_plane(Moments(100, 1.0, 0.0, math.nan, math.nan))

    def test_negative_s_rejected(self):
        with pytest.raises(ValueError):
            PlanePoint(-0.5, 3.0)

    @given(st.lists(st.floats(-50, 50, allow_nan=False), min_size=6, max_size=64))
    @settings(max_examples=100)
    def test_pearson_feasibility_inherited(self, values):
        arr = np.asarray(values)
        if arr.std() <= 1e-3 * (1 + abs(arr.mean())):
            return
        p = to_plane(moments(arr))
        assert p.k >= p.s + 1.0 - 1e-12


class TestMetrics:
    def test_landmark_identities(self):
        assert metric1(PlanePoint(0.0, 3.0)) == 0.0
        assert metric2(PlanePoint(0.0, 3.0)) == 1.2
        assert metric2(PlanePoint(0.0, 1.8)) == 0.0
        assert metric1(PlanePoint(0.0, 1.8)) == 1.2

    def test_exponential_landmark_distance(self):
        # hand computation: sqrt(4^2 + (9-3)^2) = sqrt(52)
        assert metric1(PlanePoint(4.0, 9.0)) == pytest.approx(math.sqrt(52.0), rel=1e-15)

    @given(st.floats(0, 50, allow_nan=False), st.floats(-5, 60, allow_nan=False))
    def test_non_negative_and_zero_only_at_landmark(self, s, k):
        p = PlanePoint(s, k)
        assert metric1(p) >= 0.0 and metric2(p) >= 0.0
        if metric1(p) == 0.0:
            assert (s, k) == (0.0, 3.0)
        if metric2(p) == 0.0:
            assert (s, k) == (0.0, 1.8)


class TestWeibullLandmark:
    def test_exponential_shape(self):
        s, k = weibull_landmark(1.0)
        assert abs(s - 4.0) < 1e-9 and abs(k - 9.0) < 1e-9

    def test_rayleigh_frozen_values(self):
        # Gamma-function evaluation, frozen; g1 = 0.63111...
        s, k = weibull_landmark(2.0)
        assert s == pytest.approx(0.39830066241265777, abs=1e-9)
        assert k == pytest.approx(3.245089300687638, abs=1e-9)

    def test_rayleigh_against_monte_carlo(self):
        x = np.random.default_rng(1).weibull(2.0, 1_000_000)
        m = moments(x)
        s, k = weibull_landmark(2.0)
        assert m.skewness**2 == pytest.approx(s, abs=0.01)
        assert m.kurtosis == pytest.approx(k, abs=0.05)

    def test_skew_zero_shape_by_bisection(self):
        # oracle: bisection root of g1(c) = 0 between 3 and 4
        def g1(c):
            s, _ = weibull_landmark(c)
            mu = [math.gamma(1 + r / c) for r in (1, 2, 3)]
            m3 = mu[2] - 3 * mu[0] * mu[1] + 2 * mu[0] ** 3
            return math.copysign(math.sqrt(s), m3)

        lo, hi = 3.0, 4.0
        for _ in range(60):
            mid = (lo + hi) / 2
            if g1(mid) > 0:
                lo = mid
            else:
                hi = mid
        c_star = (lo + hi) / 2
        assert c_star == pytest.approx(3.602349, abs=1e-5)
        s, _ = weibull_landmark(c_star)
        assert s < 1e-12

    def test_non_positive_shape(self):
        with pytest.raises(NonPositiveShape):
            weibull_landmark(0.0)
        with pytest.raises(NonPositiveShape):
            weibull_landmark(-2.0)

    def test_curve_grid_monotone_and_feasible(self):
        lm = default_landmarks()
        assert len(lm.weibull_curve) == 200
        for s, k in lm.weibull_curve:
            assert k >= s + 1.0 - 1e-9


class TestClassifyZone:
    def test_normal_landmark(self):
        assert classify_zone(PlanePoint(0.0, 3.0)) is Zone.NORMAL_VICINITY

    def test_uniform_draws(self):
        x = np.random.default_rng(0).uniform(0, 1, 10_000)
        assert classify_zone(to_plane(moments(x))) is Zone.UNIFORM_VICINITY

    def test_beta22_windows(self):
        # population landmark (0, 15/7) sits inside the beta zone
        assert classify_zone(PlanePoint(0.0, 15.0 / 7.0)) is Zone.BETA_ZONE
        rng = np.random.default_rng(2024)
        hits = sum(
            classify_zone(to_plane(moments(rng.beta(2, 2, 10_000)))) is Zone.BETA_ZONE
            for _ in range(100)
        )
        assert hits >= 90

    def test_exponential_reads_as_gamma(self):
        x = np.random.default_rng(5).exponential(1.0, 10_000)
        p = to_plane(moments(x))
        assert math.hypot(p.s - 4.0, p.k - 9.0) < 0.1
        assert classify_zone(p) is Zone.GAMMA_LINE

    def test_rayleigh_reads_as_weibull(self):
        x = np.random.default_rng(1).weibull(2.0, 10_000)
        assert classify_zone(to_plane(moments(x))) is Zone.WEIBULL_BAND

    def test_infeasible_and_other(self):
        assert classify_zone(PlanePoint(1.0, 1.0)) is Zone.INFEASIBLE
        assert classify_zone(PlanePoint(0.5, 6.0)) is Zone.OTHER

    @given(st.floats(0, 60, allow_nan=False), st.floats(-10, 100, allow_nan=False))
    @settings(max_examples=200)
    def test_total_and_deterministic(self, s, k):
        p = PlanePoint(s, k)
        z = classify_zone(p)
        assert isinstance(z, Zone)
        assert classify_zone(p) is z


class TestMetricSeries:
    def test_single_normal_window(self):
        out = metric_series([window_at(1000)])
        assert out == [(1000, 0.0, 1.2)]

    def test_degenerate_markers_keep_alignment(self):
        wins = [window_at(1000), window_at(2000, degenerate=True), window_at(3000, kurt=4.0)]
        out = metric_series(wins)
        assert [t for t, _, _ in out] == [1000, 2000, 3000]
        assert math.isnan(out[1][1]) and math.isnan(out[1][2])
        assert out[2][1] == 1.0

    def test_all_degenerate(self):
        with pytest.raises(AllWindowsDegenerate):
            metric_series([window_at(1000, degenerate=True)])


class TestCurvature:
    def test_collinear_is_zero(self):
        traj = Trajectory(tuple(PlanePoint(float(i), 3.0 + 2.0 * i, i) for i in range(3)))
        assert curvature_profile(traj) == [(1, 0.0)]

    def test_circle_radius_two(self):
        pts = []
        for i, theta in enumerate(np.linspace(0, 1.5 * math.pi, 40)):
            pts.append(PlanePoint(5.0 + 2.0 * math.cos(theta), 10.0 + 2.0 * math.sin(theta), i))
        kappas = [k for _, k in curvature_profile(Trajectory(tuple(pts)))]
        assert all(abs(k - 0.5) < 1e-6 for k in kappas)

    def test_noisy_unit_circle(self):
        rng = np.random.default_rng(9)
        pts = []
        for i, theta in enumerate(np.linspace(0, 2 * math.pi, 100, endpoint=False)):
            pts.append(
                PlanePoint(
                    3.0 + math.cos(theta) + rng.normal(0, 1e-4),
                    5.0 + math.sin(theta) + rng.normal(0, 1e-4),
                    i,
                )
            )
        kappas = [k for _, k in curvature_profile(Trajectory(tuple(pts)))]
        assert abs(np.mean(kappas) - 1.0) < 0.01

    def test_rigid_motion_invariance(self):
        rng = np.random.default_rng(3)
        base = np.column_stack([rng.uniform(1, 4, 12), rng.uniform(5, 9, 12)])
        ref = [
            k
            for _, k in curvature_profile(
                Trajectory(tuple(PlanePoint(x, y, i) for i, (x, y) in enumerate(base)))
            )
        ]
        for theta in (0.3, 1.2, 2.5):
            c, s = math.cos(theta), math.sin(theta)
            rot = base @ np.array([[c, s], [-s, c]])
            rot = rot - rot[:, 0].min() + 1.0  # keep s coordinates positive
            moved = [
                k
                for _, k in curvature_profile(
                    Trajectory(tuple(PlanePoint(x, y + 20.0, i) for i, (x, y) in enumerate(rot)))
                )
            ]
            for a, b in zip(ref, moved):
                assert b == pytest.approx(a, rel=1e-9, abs=1e-9)

    def test_repeated_point_gives_zero(self):
        traj = Trajectory(
            (PlanePoint(1.0, 3.0, 0), PlanePoint(1.0, 3.0, 1), PlanePoint(2.0, 4.0, 2))
        )
        assert curvature_profile(traj) == [(1, 0.0)]

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            curvature_profile(Trajectory((PlanePoint(0, 3, 0), PlanePoint(1, 4, 1))))


class TestTrajectory:
    def test_time_order_enforced(self):
        with pytest.raises(ValueError):
            Trajectory((PlanePoint(0, 3, 10), PlanePoint(0, 3, 5)))

    def test_marks_order_enforced(self):
        with pytest.raises(ValueError):
            Trajectory((PlanePoint(0, 3, 0),), phase_marks=((100, "E"), (200, "S")))
        Trajectory((PlanePoint(0, 3, 0),), phase_marks=((100, "S"), (200, "E")))

    def test_from_windows_skips_degenerate(self):
        wins = [window_at(1000), window_at(2000, degenerate=True), window_at(3000)]
        traj = trajectory_from_windows(wins)
        assert [p.t_mid_ms for p in traj.points] == [1000, 3000]


class TestExportPlane:
    def test_structure_and_json(self, rng):
        wins = [window_at(1000), window_at(2000, degenerate=True)]
        cloud = bootstrap(rng.normal(0, 1, 64), B=5, seed=1)
        doc = export_plane(wins, bootstrap_cloud=cloud, phase_marks=((500, "S"), (1500, "E")))
        text = json.dumps(doc)
        back = json.loads(text)
        assert set(back) == {"landmarks", "rho", "tau", "points", "bootstrap_cloud", "phase_marks"}
        assert back["landmarks"]["normal"] == [0.0, 3.0]
        assert back["landmarks"]["uniform"] == [0.0, 1.8]
        assert len(back["landmarks"]["weibull_curve"]) == 200
        assert back["points"][0]["zone"] == "normal_vicinity"
        assert back["points"][0]["metric2"] == 1.2
        assert back["points"][1]["s"] is None and back["points"][1]["zone"] is None
        assert len(back["bootstrap_cloud"]) == 5
        assert back["phase_marks"] == [[500, "S"], [1500, "E"]]
