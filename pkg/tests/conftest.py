import numpy as np
import pytest

from radonad.data import TimeSeries


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def make_series(rng, length=64, channels=1, scale=1.0, series_id="s"):
    values = scale * rng.standard_normal((length, channels))
    return TimeSeries(values, series_id=series_id)


def make_sine_bank(rng, n=6, length=120, noise=0.05, period=25.0):
    t = np.arange(length)
    out = []
    for i in range(n):
        phase = rng.uniform(0, 2 * np.pi)
        vals = np.sin(2 * np.pi * t / period + phase) + noise * rng.standard_normal(length)
        out.append(TimeSeries(vals, series_id=f"sine{i}"))
    return out
