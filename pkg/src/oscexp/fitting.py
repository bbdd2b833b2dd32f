"""Log-log least squares for power laws."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    amplitude: float
    r_squared: float
    window: tuple

    def predict(self, x):
        return self.amplitude * np.asarray(x, dtype=float) ** self.exponent


def decay_fit(points) -> PowerLawFit:
    """Fit y = amplitude * x**exponent by least squares on (log x, log y)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (x, y) pairs")
    if pts.shape[0] < 3:
        raise ValueError("need at least 3 points")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs positive x and y")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    # flat data: the spread is pure rounding noise, so the fit is exact
    flat = ss_tot <= 1e-24 * max(1.0, float(np.sum(ly**2)))
    r2 = 1.0 if flat else 1.0 - ss_res / ss_tot
    return PowerLawFit(float(slope), float(np.exp(intercept)), float(min(max(r2, 0.0), 1.0)), (float(x.min()), float(x.max())))


CONVERGING = "converging"
DIVERGING = "diverging"
INCONCLUSIVE = "inconclusive"
CONTRACTION_RATIO = 0.7
GROWTH_FACTOR = 2.0


def stabilization_verdict(values) -> str:
    """Classify cumulative integrals I(R_1) < ... < I(R_n) over growing cutoffs.

    "converging" if every increment is positive and each is at most 0.7 times
    the previous one; "diverging" if I(R_n) / I(R_1) >= 2 and the increments
    never decrease; "inconclusive" otherwise.  Needs at least 4 values.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 4:
        raise ValueError("need at least 4 cumulative values")
    if not np.all(np.isfinite(v)):
        return INCONCLUSIVE
    inc = np.diff(v)
    if np.all(inc > 0) and np.all(inc[1:] <= CONTRACTION_RATIO * inc[:-1]):
        return CONVERGING
    if v[0] > 0 and v[-1] / v[0] >= GROWTH_FACTOR and np.all(inc[1:] >= inc[:-1]):
        return DIVERGING
    return INCONCLUSIVE
