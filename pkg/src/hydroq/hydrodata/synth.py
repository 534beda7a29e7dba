"""Calibrated synthetic daily station data.

Levels are built from a winter-peaking seasonal cycle, AR(1) noise and a
linear-reservoir response to rainfall, then mapped through a monotone
exponential so that the flood rate, the level mean and the level maximum
hit their targets. A smooth per-block shift keeps the flood rate of every
year-long block (anniversaries of the start date) close to the target, so
any test window spanning whole blocks inherits the class balance. The
default start of 1 July puts block edges in the dry season. Rainfall comes
from a two-state Markov wet/dry chain with gamma amounts, power-transformed
to match the mean and maximum.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from ..errors import ConfigError
from .dataset import FORM, LEVEL, PRECIP, HydroTable

_BISECT_STEPS = 200
LEVEL_FLOOR_CM = 5.0


@dataclass(frozen=True)
class SynthCalibration:
    flood_rate: float = 0.0578
    level_mean: float = 37.0
    level_max: float = 376.0
    precip_mean: float = 3.10
    precip_max: float = 90.8
    threshold_cm: float = 90.0
    years: int = 20
    start: str = "2004-07-01"
    station_id: str = "synthetic_station"

    def validate(self) -> None:
        for name in ("flood_rate", "level_mean", "level_max", "precip_mean", "precip_max",
                     "threshold_cm"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"calibration target {name} must be positive")
        if not self.flood_rate < 0.5:
            raise ConfigError("flood_rate must be below 0.5")
        if not self.level_mean < self.threshold_cm < self.level_max:
            raise ConfigError("need level_mean < threshold_cm < level_max")
        if not self.precip_mean < self.precip_max:
            raise ConfigError("precip_mean must be below precip_max")
        if self.years < 1:
            raise ConfigError("years must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


def _bisect(fn, lo, hi, target):
    """Root of increasing ``fn(x) = target`` on [lo, hi]."""
    f_lo, f_hi = fn(lo), fn(hi)
    if not f_lo <= target <= f_hi:
        return None
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def _rainfall(rng, doy, calib):
    n = doy.shape[0]
    season = np.cos(2 * np.pi * (doy - 15.0) / 365.25)
    p_wet = 0.48 + 0.08 * season
    u = rng.random(n)
    amounts = rng.gamma(0.75, 1.0, size=n)
    wet = np.zeros(n, dtype=bool)
    for t in range(n):
        p = p_wet[t] + (0.2 if t and wet[t - 1] else -0.12)
        wet[t] = u[t] < p
    raw = np.where(wet, amounts * (1.0 + 0.3 * season), 0.0)
    target_ratio = calib.precip_max / calib.precip_mean
    pos = raw[raw > 0]
    if pos.size == 0:
        raise ConfigError("no wet days generated")

    def ratio(k):
        v = raw ** k
        return v.max() / v.mean()

    k = _bisect(ratio, 0.05, 6.0, target_ratio)
    if k is None:
        raise ConfigError(f"precipitation max/mean ratio {target_ratio:.1f} is not attainable")
    v = raw ** k
    return v * (calib.precip_mean / v.mean()), wet


def _latent_level(rng, doy, precip):
    n = doy.shape[0]
    season = np.cos(2 * np.pi * (doy - 10.0) / 365.25)
    noise = np.empty(n)
    e = rng.standard_normal(n)
    noise[0] = e[0]
    for t in range(1, n):
        noise[t] = 0.92 * noise[t - 1] + math.sqrt(1 - 0.92**2) * e[t]
    store = np.empty(n)
    s = 0.0
    for t in range(n):
        s = 0.95 * s + precip[t]
        store[t] = s
    resp = (store - store.mean()) / store.std()
    z = 0.8 * season + 0.3 * noise + 1.5 * resp
    return (z - z.mean()) / z.std()


def _crossing(values, m):
    """Midpoint between the m-th and (m+1)-th largest values."""
    top = np.partition(values, values.size - m - 1)[values.size - m - 1:]
    top.sort()
    return 0.5 * (top[0] + top[1])


def _year_shift(z, blocks, rate, iters=40):
    """Shift each block smoothly so its exceedance count of a common crossing
    matches ``rate``; returns the shifted series."""
    uniq = np.unique(blocks)
    idx = np.arange(z.size, dtype=np.float64)
    anchors = np.array([idx[blocks == y].mean() for y in uniq])
    m_total = int(round(rate * z.size))
    zq = _crossing(z, m_total)
    delta = np.zeros(uniq.size)
    for _ in range(iters):
        zz = z + np.interp(idx, anchors, delta)
        worst = 0.0
        for k, y in enumerate(uniq):
            vals = zz[blocks == y]
            m = int(round(rate * vals.size))
            if m < 1 or m >= vals.size:
                continue
            c = _crossing(vals, m)
            delta[k] += zq - c
            worst = max(worst, abs(zq - c))
        if worst < 1e-9:
            break
    return z + np.interp(idx, anchors, delta)


def _level_transform(z, calib):
    """``level = lo + s * exp(k z)`` meeting threshold, mean and max targets."""
    m = int(round(calib.flood_rate * z.size))
    if m < 1:
        raise ConfigError("flood_rate too small for the series length")
    zq = _crossing(z, m)
    zmax = z.max()

    def fit(k):
        ez = np.exp(k * (z - zmax))
        eq = math.exp(k * (zq - zmax))
        denom = eq - ez.mean()
        s = (calib.threshold_cm - calib.level_mean) / denom
        lo = calib.threshold_cm - s * eq
        return lo, s, ez

    def top(k):
        lo, s, ez = fit(k)
        return lo + s if s > 0 else math.inf

    # top(k) rises from the linear map towards a pole where the mean of
    # exp(kz) overtakes exp(k zq); bracket the first crossing on a grid
    grid = np.geomspace(1e-3, 20.0, 400)
    vals = np.array([top(k) for k in grid])
    hit = np.flatnonzero(vals >= calib.level_max)
    k = None
    if hit.size and hit[0] > 0:
        k = _bisect(top, grid[hit[0] - 1], grid[hit[0]], calib.level_max)
    if k is None:
        raise ConfigError(f"level max {calib.level_max} is not attainable with these targets")
    lo, s, ez = fit(k)
    return lo + s * ez


def _soft_floor(level, floor):
    """C1 monotone map keeping values above ``floor`` and squeezing the rest
    into (0, floor)."""
    low = level < floor
    out = level.copy()
    out[low] = floor * np.exp((level[low] - floor) / floor)
    return out


def _calibrated_levels(z, calib):
    target = calib.level_mean
    for _ in range(50):
        level = _soft_floor(_level_transform(z, calib), LEVEL_FLOOR_CM)
        err = level.mean() - target
        if abs(err) < 1e-10:
            break
        calib = replace(calib, level_mean=calib.level_mean - err)
        if not calib.level_mean > 0:
            raise ConfigError("level mean cannot be met above the level floor")
    return level


def synth_generate(seed: int = 0, calib: SynthCalibration | None = None) -> HydroTable:
    """Daily table for ``calib.years`` years; identical output per seed."""
    calib = calib or SynthCalibration()
    calib.validate()
    rng = np.random.default_rng(seed)
    start = np.datetime64(calib.start, "D")
    y0, rest = int(str(start)[:4]), str(start)[4:]
    if rest == "-02-29":
        raise ConfigError("start date must not be 29 February")
    anniversaries = np.array([f"{y0 + k}{rest}" for k in range(calib.years + 1)], dtype="datetime64[D]")
    days = np.arange(anniversaries[0], anniversaries[-1], dtype="datetime64[D]")
    doy = (days - days.astype("datetime64[Y]")).astype(np.float64)
    blocks = np.searchsorted(anniversaries, days, side="right") - 1

    precip, wet = _rainfall(rng, doy, calib)
    z = _latent_level(rng, doy, precip)
    z = _year_shift(z, blocks, calib.flood_rate)
    level = _calibrated_levels(z, calib)

    cold = np.cos(2 * np.pi * (doy - 15.0) / 365.25) > 0.6
    u = rng.random(days.size)
    form = np.where(~wet, 0.0, np.where(cold & (u < 0.35), 2.0, np.where(cold & (u < 0.5), 3.0, 1.0)))
    table = HydroTable(days.astype("datetime64[s]"), {LEVEL: level, PRECIP: precip, FORM: form},
                       calib.station_id)
    table.notes.append(f"synthetic seed={seed} calibration={calib.to_dict()}")
    return table
