"""Log-log regression used to turn boundary behaviour into exponents."""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

FIT_WINDOW = (1e-3, 1e-1)
SLOPE_TOL = 0.1
MIN_BINS = 4


@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    residual: float
    points: int
    deepest: float

    def to_dict(self) -> dict:
        return asdict(self)


def loglog_fit(x, y) -> Fit:
    """Least-squares line through ``(log x, log y)``; ``residual`` is the RMS misfit."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    keep = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if x.size < 2:
        return Fit(float("nan"), float("nan"), float("nan"), int(x.size), float(np.min(x)) if x.size else float("nan"))
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    res = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return Fit(float(slope), float(intercept), res, int(x.size), float(np.min(x)))


def envelope_fit(delta, values, window=FIT_WINDOW, bins: int = 12, reduce: str = "max") -> Fit:
    """Fit the per-bin envelope of ``values`` against ``delta``.

    ``delta`` is binned on a log scale over ``window``; each bin contributes
    its maximum (``reduce="max"``) or its sum (``reduce="sum"``).  Bins with
    no positive value are dropped.
    """
    delta = np.asarray(delta, dtype=float).ravel()
    values = np.asarray(values, dtype=float).ravel()
    lo, hi = window
    edges = np.geomspace(lo, hi, bins + 1)
    # tolerate points sitting on the window edges up to rounding
    idx = np.searchsorted(edges, delta * (1 + 1e-9), side="right") - 1
    idx = np.where((delta >= lo * (1 - 1e-9)) & (idx == -1), 0, idx)
    idx = np.where((delta <= hi * (1 + 1e-9)) & (idx == bins), bins - 1, idx)
    xs, ys = [], []
    for b in range(bins):
        sel = (idx == b) & (values > 0) & np.isfinite(values)
        if not np.any(sel):
            continue
        xs.append(np.sqrt(edges[b] * edges[b + 1]))
        ys.append(values[sel].max() if reduce == "max" else values[sel].sum())
    return loglog_fit(xs, ys)


def depth_ok(fit: Fit, window=FIT_WINDOW, min_bins: int = MIN_BINS) -> bool:
    """Whether the fit reached the deep end of the window with enough bins."""
    return fit.points >= min_bins and np.isfinite(fit.slope) and fit.deepest <= window[0] * 2.0
