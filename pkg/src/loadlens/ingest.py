"""Raw sensor CSV parsing and normalization.

File formats (UTF-8, comma-separated, dot decimal, one header row):

* ``accel.csv``    -- ``t_ms,ax,ay,az``
* ``rr.csv``       -- ``t_ms,rr_ms``
* ``sessions.csv`` -- ``session_id,activity,distance_km,duration_min,accel_file,rr_file``

Timestamps are integer milliseconds since session start and must be strictly
increasing within a file. RR intervals stay real-valued: the millisecond
heartbeat carries 3-4 significant digits, an order more precision than the
rounded integer heart rate derived from it.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

from .errors import (
    EmptyFile,
    EmptyInput,
    InvalidRr,
    MalformedRow,
    NonMonotonicTime,
    NonPositiveRr,
    UnknownLabel,
)

#: Default activity label registry, ordinal order fixed (walking < running < skiing).
DEFAULT_ACTIVITIES = ("walking", "running", "skiing")

ACCEL_HEADER = ("t_ms", "ax", "ay", "az")
RR_HEADER = ("t_ms", "rr_ms")
SESSIONS_HEADER = (
    "session_id",
    "activity",
    "distance_km",
    "duration_min",
    "accel_file",
    "rr_file",
)


@dataclass(frozen=True)
class AccelSample:
    """One tri-axial accelerometer reading (m/s^2)."""

    t_ms: int
    ax: float
    ay: float
    az: float


@dataclass(frozen=True)
class RrSample:
    """One heartbeat interval in milliseconds."""

    t_ms: int
    rr_ms: float


@dataclass(frozen=True)
class SessionMeta:
    """Descriptive record for one exercise session."""

    session_id: str
    activity: str
    distance_km: float
    duration_min: float
    accel_file: str = ""
    rr_file: str = ""

    def __post_init__(self):
        if self.distance_km < 0:
            raise ValueError(f"distance_km must be >= 0, got {self.distance_km}")
        if self.duration_min <= 0:
            raise ValueError(f"duration_min must be > 0, got {self.duration_min}")


@dataclass(frozen=True)
class MagnitudeSeries:
    """Common carrier for a univariate time series (accel magnitude or rr_ms)."""

    t_ms: tuple[int, ...]
    value: tuple[float, ...]

    def __post_init__(self):
        if len(self.t_ms) != len(self.value):
            raise ValueError("t_ms and value must have equal length")

    def __len__(self) -> int:
        return len(self.value)


def _parse_float(text: str, row: int, field: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise MalformedRow(row, f"bad {field} {text!r}") from None
    if not math.isfinite(v):
        raise MalformedRow(row, f"non-finite {field} {text!r}")
    return v


def _parse_t(text: str, row: int) -> int:
    try:
        t = int(text)
    except ValueError:
        raise MalformedRow(row, f"bad t_ms {text!r}") from None
    if t < 0:
        raise MalformedRow(row, f"negative t_ms {t}")
    return t


def _read_rows(path, expected_header):
    """Yield (data_row_index, fields) after validating the header."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != expected_header:
            raise MalformedRow(0, f"expected header {','.join(expected_header)}")
        row = 0
        for fields in reader:
            if not fields:
                continue
            row += 1
            if len(fields) != len(expected_header):
                raise MalformedRow(row, f"expected {len(expected_header)} fields")
            yield row, fields


def parse_accel_csv(path) -> list[AccelSample]:
    """Parse an accelerometer CSV, verifying monotonic timestamps.

    Raises MalformedRow, NonMonotonicTime or EmptyFile; row numbers count
    data rows from 1, header excluded.
    """
    samples: list[AccelSample] = []
    prev_t = -1
    for row, fields in _read_rows(path, ACCEL_HEADER):
        t = _parse_t(fields[0], row)
        if t <= prev_t:
            raise NonMonotonicTime(row)
        prev_t = t
        samples.append(
            AccelSample(
                t,
                _parse_float(fields[1], row, "ax"),
                _parse_float(fields[2], row, "ay"),
                _parse_float(fields[3], row, "az"),
            )
        )
    if not samples:
        raise EmptyFile(f"{path}: no data rows")
    return samples


def parse_rr_csv(path) -> list[RrSample]:
    """Parse a heartbeat-interval CSV. rr_ms must be finite and > 0."""
    samples: list[RrSample] = []
    prev_t = -1
    for row, fields in _read_rows(path, RR_HEADER):
        t = _parse_t(fields[0], row)
        if t <= prev_t:
            raise NonMonotonicTime(row)
        prev_t = t
        try:
            rr = float(fields[1])
        except ValueError:
            raise MalformedRow(row, f"bad rr_ms {fields[1]!r}") from None
        if not math.isfinite(rr) or rr <= 0:
            raise InvalidRr(row, rr)
        samples.append(RrSample(t, rr))
    if not samples:
        raise EmptyFile(f"{path}: no data rows")
    return samples


def parse_sessions_csv(path, labels=DEFAULT_ACTIVITIES) -> list[SessionMeta]:
    """Parse the session registry CSV.

    Activity labels are checked against ``labels``; pass a custom tuple to
    extend the registry.
    """
    metas: list[SessionMeta] = []
    for row, fields in _read_rows(path, SESSIONS_HEADER):
        activity = fields[1].strip()
        if activity not in labels:
            raise UnknownLabel(activity)
        distance = _parse_float(fields[2], row, "distance_km")
        duration = _parse_float(fields[3], row, "duration_min")
        if distance < 0:
            raise MalformedRow(row, f"negative distance_km {distance}")
        if duration <= 0:
            raise MalformedRow(row, f"non-positive duration_min {duration}")
        metas.append(
            SessionMeta(fields[0].strip(), activity, distance, duration, fields[4].strip(), fields[5].strip())
        )
    if not metas:
        raise EmptyFile(f"{path}: no data rows")
    return metas


def write_accel_csv(path, samples: list[AccelSample]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(ACCEL_HEADER)
        for s in samples:
            w.writerow([s.t_ms, repr(s.ax), repr(s.ay), repr(s.az)])


def write_rr_csv(path, samples: list[RrSample]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(RR_HEADER)
        for s in samples:
            w.writerow([s.t_ms, repr(s.rr_ms)])


def write_sessions_csv(path, metas: list[SessionMeta]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(SESSIONS_HEADER)
        for m in metas:
            w.writerow(
                [m.session_id, m.activity, repr(m.distance_km), repr(m.duration_min), m.accel_file, m.rr_file]
            )


def accel_magnitude(samples: list[AccelSample], center: bool = False) -> MagnitudeSeries:
    """Reduce tri-axial samples to the Euclidean magnitude sqrt(ax^2+ay^2+az^2).

    The magnitude is orientation-invariant, so no axis calibration is needed.
    With ``center=True`` the series mean is subtracted from every value
    (crude gravity removal); default is the raw magnitude.
    """
    if not samples:
        raise EmptyInput("accel_magnitude needs at least one sample")
    values = [math.sqrt(s.ax * s.ax + s.ay * s.ay + s.az * s.az) for s in samples]
    if center:
        mean = math.fsum(values) / len(values)
        values = [v - mean for v in values]
    return MagnitudeSeries(tuple(s.t_ms for s in samples), tuple(values))


def rr_series(samples: list[RrSample]) -> MagnitudeSeries:
    """Wrap RR samples in the common series carrier."""
    if not samples:
        raise EmptyInput("rr_series needs at least one sample")
    return MagnitudeSeries(tuple(s.t_ms for s in samples), tuple(s.rr_ms for s in samples))


def rr_to_hr(rr_ms: float) -> float:
    """Instantaneous heart rate in bpm, unrounded: 60000 / rr_ms."""
    if not rr_ms > 0:
        raise NonPositiveRr(f"rr_ms must be > 0, got {rr_ms}")
    return 60000.0 / rr_ms


def hr_display(rr_ms: float) -> int:
    """The integer heart rate a watch would display (round half to even)."""
    return round(rr_to_hr(rr_ms))


def resolve_channel_path(sessions_path, channel_file: str) -> str:
    """Channel files are stored relative to the sessions.csv directory."""
    if os.path.isabs(channel_file):
        return channel_file
    return os.path.join(os.path.dirname(os.path.abspath(sessions_path)), channel_file)
