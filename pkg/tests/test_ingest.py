import math
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loadlens.errors import (
    EmptyFile,
    EmptyInput,
    InvalidRr,
    MalformedRow,
    NonMonotonicTime,
    NonPositiveRr,
    UnknownLabel,
)
from loadlens.ingest import (
    AccelSample,
    RrSample,
    SessionMeta,
    accel_magnitude,
    hr_display,
    parse_accel_csv,
    parse_rr_csv,
    parse_sessions_csv,
    rr_series,
    rr_to_hr,
    write_accel_csv,
    write_rr_csv,
    write_sessions_csv,
)


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestParseAccel:
    def test_gravity_rest_rows(self, tmp_path):
        p = _write(tmp_path / "a.csv", "t_ms,ax,ay,az\n0,0,0,9.81\n10,0,0,9.81\n")
        samples = parse_accel_csv(p)
        assert len(samples) == 2
        mags = accel_magnitude(samples)
        assert mags.value == (9.81, 9.81)

    def test_duplicate_timestamp_row_number(self, tmp_path):
        p = _write(tmp_path / "a.csv", "t_ms,ax,ay,az\n0,0,0,1\n10,0,0,1\n10,0,0,1\n")
        with pytest.raises(NonMonotonicTime) as ei:
            parse_accel_csv(p)
        assert ei.value.row == 3

    def test_roundtrip_bit_identical(self, tmp_path, rng):
        # oracle: write-then-parse must reproduce the generated samples exactly
        samples = [
            AccelSample(int(t), float(x), float(y), float(z))
            for t, (x, y, z) in zip(
                np.cumsum(rng.integers(1, 50, size=1000)),
                rng.normal(0, 3, size=(1000, 3)),
            )
        ]
        p = tmp_path / "round.csv"
        write_accel_csv(p, samples)
        assert parse_accel_csv(p) == samples

    def test_empty_file(self, tmp_path):
        with pytest.raises(EmptyFile):
            parse_accel_csv(_write(tmp_path / "e.csv", ""))
        with pytest.raises(EmptyFile):
            parse_accel_csv(_write(tmp_path / "h.csv", "t_ms,ax,ay,az\n"))

    def test_malformed_rows(self, tmp_path):
        with pytest.raises(MalformedRow) as ei:
            parse_accel_csv(_write(tmp_path / "b.csv", "t_ms,ax,ay,az\n0,a,0,0\n"))
        assert ei.value.row == 1
        with pytest.raises(MalformedRow):
            parse_accel_csv(_write(tmp_path / "c.csv", "t_ms,ax,ay,az\n0,1,2\n"))
        with pytest.raises(MalformedRow):
            parse_accel_csv(_write(tmp_path / "d.csv", "wrong,header,x,y\n0,1,2,3\n"))
        with pytest.raises(MalformedRow):
            parse_accel_csv(_write(tmp_path / "f.csv", "t_ms,ax,ay,az\n-5,1,2,3\n"))
        with pytest.raises(MalformedRow):
            parse_accel_csv(_write(tmp_path / "g.csv", "t_ms,ax,ay,az\n0,nan,2,3\n"))


class TestParseRr:
    def test_single_row(self, tmp_path):
        p = _write(tmp_path / "rr.csv", "t_ms,rr_ms\n0,800.0\n")
        samples = parse_rr_csv(p)
        assert samples == [RrSample(0, 800.0)]
        assert rr_to_hr(samples[0].rr_ms) == 75.0

    def test_negative_rr(self, tmp_path):
        with pytest.raises(InvalidRr) as ei:
            parse_rr_csv(_write(tmp_path / "rr.csv", "t_ms,rr_ms\n0,-5\n"))
        assert ei.value.row == 1

    def test_nan_rr(self, tmp_path):
        with pytest.raises(InvalidRr):
            parse_rr_csv(_write(tmp_path / "rr.csv", "t_ms,rr_ms\n0,nan\n"))

    def test_synthetic_rest_count(self, tmp_path, rng):
        # oracle: the generator wrote exactly 500 rows
        rr = 800.0 + rng.normal(0, 20, size=500)
        t = np.cumsum(rr).round().astype(int)
        samples = [RrSample(int(ti), float(ri)) for ti, ri in zip(t, rr)]
        p = tmp_path / "rest.csv"
        write_rr_csv(p, samples)
        parsed = parse_rr_csv(p)
        assert len(parsed) == 500
        assert parsed == samples


class TestSessions:
    def test_roundtrip(self, tmp_path):
        metas = [
            SessionMeta("w001", "walking", 3.5, 40.0, "w001_a.csv", "w001_r.csv"),
            SessionMeta("r001", "running", 10.0, 55.0, "r001_a.csv", "r001_r.csv"),
        ]
        p = tmp_path / "sessions.csv"
        write_sessions_csv(p, metas)
        assert parse_sessions_csv(p) == metas

    def test_unknown_label(self, tmp_path):
        p = _write(
            tmp_path / "s.csv",
            "session_id,activity,distance_km,duration_min,accel_file,rr_file\n"
            "x,flying,1.0,10.0,a.csv,r.csv\n",
        )
        with pytest.raises(UnknownLabel):
            parse_sessions_csv(p)

    def test_bad_duration(self, tmp_path):
        p = _write(
            tmp_path / "s.csv",
            "session_id,activity,distance_km,duration_min,accel_file,rr_file\n"
            "x,walking,1.0,0,a.csv,r.csv\n",
        )
        with pytest.raises(MalformedRow):
            parse_sessions_csv(p)

    def test_meta_invariants(self):
        with pytest.raises(ValueError):
            SessionMeta("x", "walking", -1.0, 10.0)
        with pytest.raises(ValueError):
            SessionMeta("x", "walking", 1.0, 0.0)


class TestMagnitude:
    def test_three_four_five(self):
        mags = accel_magnitude([AccelSample(0, 3.0, 4.0, 0.0)])
        assert mags.value == (5.0,)

    def test_center_constant_is_zero(self):
        samples = [AccelSample(t, 0.0, 0.0, 9.81) for t in range(0, 50, 10)]
        mags = accel_magnitude(samples, center=True)
        assert all(v == 0.0 for v in mags.value)

    def test_centered_mean_is_zero(self, rng):
        samples = [
            AccelSample(i * 10, *map(float, rng.normal(0, 2, 3))) for i in range(100)
        ]
        centered = accel_magnitude(samples, center=True)
        # oracle: direct mean of the output
        assert abs(math.fsum(centered.value) / 100) < 1e-12

    def test_empty(self):
        with pytest.raises(EmptyInput):
            accel_magnitude([])
        with pytest.raises(EmptyInput):
            rr_series([])

    @given(
        st.lists(
            st.tuples(
                st.floats(-100, 100, allow_nan=False),
                st.floats(-100, 100, allow_nan=False),
                st.floats(-100, 100, allow_nan=False),
            ),
            min_size=1,
            max_size=20,
        ),
        st.permutations([0, 1, 2]),
    )
    def test_axis_permutation_invariance(self, triples, perm):
        base = [AccelSample(i, *t) for i, t in enumerate(triples)]
        permuted = [
            AccelSample(i, t[perm[0]], t[perm[1]], t[perm[2]])
            for i, t in enumerate(triples)
        ]
        for a, b in zip(accel_magnitude(base).value, accel_magnitude(permuted).value):
            assert a == pytest.approx(b, rel=1e-12)


class TestHeartRate:
    def test_exact_divisions(self):
        assert rr_to_hr(800.0) == 75.0
        assert rr_to_hr(1000.0) == 60.0
        assert hr_display(800.0) == 75

    def test_typical_value_against_long_division(self):
        # oracle: decimal long division, frozen to double precision
        expected = float(Decimal(60000) / Decimal("812.3"))
        assert rr_to_hr(812.3) == pytest.approx(expected, abs=1e-12)
        assert 73.86 < rr_to_hr(812.3) < 73.87
        assert hr_display(812.3) == 74

    def test_round_half_to_even(self):
        # 60000/rr == 74.5 has no exact double rr, so drive round() directly
        assert round(74.5) == 74
        assert round(75.5) == 76

    def test_non_positive(self):
        with pytest.raises(NonPositiveRr):
            rr_to_hr(0.0)
        with pytest.raises(NonPositiveRr):
            rr_to_hr(-800.0)

    @given(st.floats(20.0, 250.0, allow_nan=False))
    @settings(max_examples=200)
    def test_round_trip(self, h):
        assert rr_to_hr(60000.0 / h) == pytest.approx(h, abs=1e-9)
