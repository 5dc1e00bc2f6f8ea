"""Profile synthesis and manipulation for loads and renewable resources.

A profile is a 1-minute MW series.  Renewable shapes are stored normalized
to unit mean so that scaling by capacity factor, penetration and peak load
produces the target fleet; variability is adjusted by resampling the shape
in time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ProfileError(ValueError):
    pass


@dataclass
class Profile:
    values: np.ndarray
    start: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or len(self.values) < 1:
            raise ProfileError("profile needs at least one sample")
        if not np.all(np.isfinite(self.values)):
            raise ProfileError("profile contains non-finite values")

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class ForecastSeries:
    block_minutes: int
    values: np.ndarray
    issue_minute: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)

    def at_minute(self, minute: int) -> float:
        """Block value covering an absolute minute."""
        k = (minute - self.issue_minute) // self.block_minutes
        k = min(max(k, 0), len(self.values) - 1)
        return float(self.values[k])


@dataclass
class RampStats:
    resolution: str                    # 1min | 10min | 1h | 4h
    max_up: float                      # MW/min
    max_down: float                    # MW/min, magnitude
    series: np.ndarray = field(default_factory=lambda: np.zeros(0))


_BLOCK_MINUTES = {"1min": 1, "10min": 10, "1h": 60}


def variability(p: Profile) -> float:
    """RMS of the forward-difference rate over RMS of the values, 1/min."""
    v = p.values
    if len(v) < 2:
        raise ProfileError("variability needs at least two samples")
    denom = float(np.sqrt(np.mean(v * v)))
    if denom == 0.0:
        raise ProfileError("variability undefined for an all-zero profile")
    rate = np.diff(v)
    return float(np.sqrt(np.mean(rate * rate))) / denom


def resample(values: np.ndarray, alpha: float, n_out: int) -> np.ndarray:
    """Sample values(alpha*t) with linear interpolation and periodic wrap."""
    n = len(values)
    t = (alpha * np.arange(n_out)) % n
    ext = np.concatenate([values, values[:1]])
    return np.interp(t, np.arange(n + 1), ext)


def scale_ver(base: Profile, spec, peak_load: float,
              n_out: int | None = None) -> Profile:
    """Scale a unit-mean shape to a fleet with the requested penetration,
    capacity factor and variability.

    ``spec`` provides pi, gamma_cf, A (target variability, 1/h; 0 keeps the
    base timing).
    """
    v = base.values
    if len(v) == 0:
        raise ProfileError("empty base shape")
    mean = float(v.mean())
    if abs(mean - 1.0) > 1e-6:
        raise ProfileError(f"base shape mean {mean:.6f} is not 1")
    target_a = float(getattr(spec, "A", 0.0) or 0.0) / 60.0  # 1/h -> 1/min
    if target_a > 0.0:
        a0 = variability(base)
        if a0 == 0.0:
            raise ProfileError("cannot scale the variability of a constant shape")
        alpha = target_a / a0
    else:
        alpha = 1.0
    out = resample(v, alpha, n_out if n_out is not None else len(v))
    scale = spec.gamma_cf * spec.pi * peak_load
    return Profile(out * scale, start=base.start)


def best_forecast(p: Profile, block_minutes: int) -> ForecastSeries:
    """Per-block mean of the minute samples."""
    if block_minutes <= 0:
        raise ProfileError("block duration must be positive")
    n = len(p)
    if n % block_minutes:
        raise ProfileError(f"block duration {block_minutes} does not divide {n}")
    blocks = p.values.reshape(-1, block_minutes).mean(axis=1)
    return ForecastSeries(block_minutes, blocks, issue_minute=p.start)


_PHI = {"day-ahead": 0.6, "short-term": 0.3, "real-time": 0.2}


def synthesize_error(seed: int, eps: float, pi: float, peak_load: float,
                     n_blocks: int, kind: str = "day-ahead",
                     state: float | None = None) -> np.ndarray:
    """Zero-mean error blocks with std eps*pi*peak_load.

    The unit-variance driver is AR(1); ``state`` lets callers chain windows
    (pass the previous window's last unit value) for a continuous sequence.
    """
    if eps < 0:
        raise ProfileError("negative error std")
    phi = _PHI[kind]
    rng = np.random.default_rng(seed)
    e = np.empty(n_blocks)
    prev = rng.standard_normal() if state is None else state
    w = np.sqrt(1.0 - phi * phi)
    for k in range(n_blocks):
        prev = phi * prev + w * rng.standard_normal()
        e[k] = prev
    return e * (eps * pi * peak_load)


def make_forecast(actual: Profile, errors: np.ndarray, block_minutes: int,
                  capacity: float = np.inf) -> ForecastSeries:
    """Best forecast minus the error blocks, clamped to [0, capacity]."""
    best = best_forecast(actual, block_minutes)
    if len(errors) != len(best.values):
        raise ProfileError(
            f"{len(errors)} error blocks for {len(best.values)} forecast blocks")
    vals = np.clip(best.values - np.asarray(errors, dtype=float), 0.0, capacity)
    return ForecastSeries(block_minutes, vals, issue_minute=best.issue_minute)


def net_load(load: Profile, semi_outputs: list[Profile]) -> Profile:
    out = load.values.copy()
    for s in semi_outputs:
        if len(s) != len(load):
            raise ProfileError("length mismatch between load and resource profile")
        out -= s.values
    return Profile(out, start=load.start)


def ramp_stats(p: Profile, resolution: str) -> RampStats:
    """Ramp-rate distribution at a given resolution, MW/min."""
    if resolution in _BLOCK_MINUTES:
        bm = _BLOCK_MINUTES[resolution]
        n = (len(p) // bm) * bm
        if n < 2 * bm:
            raise ProfileError(f"profile too short for {resolution} ramps")
        blocks = p.values[:n].reshape(-1, bm).mean(axis=1)
        rates = np.diff(blocks) / bm
    elif resolution == "4h":
        win, stride = 240, 60
        if len(p) < win:
            raise ProfileError("profile too short for a 4-hour window")
        rates = []
        for s in range(0, len(p) - win + 1, stride):
            w = p.values[s:s + win]
            imax = int(np.argmax(w))
            imin = int(np.argmin(w))
            if imax == imin:
                rates.append(0.0)
                continue
            r = (w[imax] - w[imin]) / abs(imax - imin)
            # Up-ramp if the peak comes after the trough.
            rates.append(r if imax > imin else -r)
        rates = np.array(rates)
    else:
        raise ProfileError(f"unknown resolution {resolution!r}")
    up = float(max(rates.max(initial=0.0), 0.0))
    down = float(max((-rates).max(initial=0.0), 0.0))
    return RampStats(resolution, up, down, rates)


def read_profile(path) -> Profile:
    """Read the `minute,value_mw` CSV format."""
    minutes: list[int] = []
    vals: list[float] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "minute,value_mw":
            raise ProfileError(f"{path}: bad profile header {header!r}")
        for ln, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                m_s, v_s = line.split(",")
                minutes.append(int(m_s))
                vals.append(float(v_s))
            except ValueError as exc:
                raise ProfileError(f"{path}:{ln}: bad row {line!r}") from exc
    if not vals:
        raise ProfileError(f"{path}: empty profile")
    start = minutes[0]
    for i, m in enumerate(minutes):
        if m != start + i:
            raise ProfileError(f"{path}: minute index gap at {m}")
    return Profile(np.array(vals), start=start)


def write_profile(path, p: Profile) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("minute,value_mw\n")
        for i, v in enumerate(p.values):
            fh.write(f"{p.start + i},{v:.6f}\n")


def write_forecast(path, f: ForecastSeries) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("block,start_minute,value_mw\n")
        for k, v in enumerate(f.values):
            fh.write(f"{k},{f.issue_minute + k * f.block_minutes},{v:.6f}\n")
