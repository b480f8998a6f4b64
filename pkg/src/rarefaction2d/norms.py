"""Discrete norms, decay series and power-law fits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFit


def lp_norm(values, p, h1=1.0, h2=1.0):
    """``(sum |f|^p h1 h2)^(1/p)``; ``p = inf`` gives the grid max.

    Pass ``h2=1`` for one-dimensional data.
    """
    f = np.abs(np.asarray(values, dtype=float))
    if f.size == 0:
        return 0.0
    if math.isinf(p):
        return float(f.max())
    top = f.max()
    if top == 0.0:
        return 0.0
    # scale first so large p cannot overflow
    s = np.sum((f / top) ** p) * h1 * h2
    return float(top * s ** (1.0 / p))


def norm_label(p):
    return "inf" if math.isinf(p) else f"{p:g}"


@dataclass
class DecaySeries:
    label: str
    p: float
    t: list = field(default_factory=list)
    values: list = field(default_factory=list)

    def append(self, t, value):
        if self.t and t <= self.t[-1]:
            raise ValueError("times must be strictly increasing")
        if not t > 0:
            raise ValueError("times must be positive")
        if value < 0:
            raise ValueError("norm values are non-negative")
        self.t.append(float(t))
        self.values.append(float(value))

    def __len__(self):
        return len(self.t)

    def arrays(self):
        return np.asarray(self.t), np.asarray(self.values)

    def csv_rows(self):
        return [(t, self.label, norm_label(self.p), v) for t, v in zip(self.t, self.values)]


@dataclass
class RateFit:
    exponent: float
    intercept: float
    r2: float
    window: tuple
    log_power: float | None = None

    def predict(self, t):
        t = np.asarray(t, dtype=float)
        out = self.intercept + self.exponent * np.log1p(t)
        if self.log_power:
            out = out + self.log_power * np.log(np.log(3.0 + t))
        return np.exp(out)


def fit_decay(series, window=None, log_power=None, min_samples=4):
    """Least-squares ``ln(value) ~ a + b ln(1+t) [+ q lnln(3+t)]`` with fixed ``q``.

    ``window`` is an inclusive ``(t_lo, t_hi)``; default is the whole series.
    """
    t, v = series.arrays()
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, v = t[keep], v[keep]
    if t.size < min_samples:
        raise DegenerateFit(f"{series.label}: {t.size} samples in window")
    if np.any(v <= 0.0):
        raise DegenerateFit(f"{series.label}: non-positive value in window")
    x = np.log1p(t)
    y = np.log(v)
    if log_power:
        y = y - log_power * np.log(np.log(3.0 + t))
    if np.ptp(x) == 0.0:
        raise DegenerateFit(f"{series.label}: single time in window")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    if ss_tot <= 1e-28 * max(1.0, float(np.sum(y * y))):
        r2 = 1.0  # flat series, the fit is exact
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return RateFit(float(slope), float(intercept), r2, (float(t[0]), float(t[-1])), log_power)
