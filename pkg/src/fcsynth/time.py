# SPDX-License-Identifier: MIT

import pendulum


def now_utc() -> pendulum.DateTime:
    return pendulum.now("UTC")


def datetime_to_iso_str(datetime: pendulum.DateTime) -> str:
    return datetime.isoformat()


def elapsed_seconds(start: pendulum.DateTime, end: pendulum.DateTime) -> float:
    return (end - start).total_seconds()


def duration_to_str(seconds: float) -> str:
    duration = pendulum.duration(seconds=seconds)
    return f"{duration.hours}:{duration.minutes:02d}:{duration.remaining_seconds:02d}"
