"""Boundary and distributed disturbance signal families.

Boundary signals are twice continuously differentiable on [0, inf) by
construction (the pulse kind is a polynomial bump whose value and first two
derivatives vanish at the support edges); the sampled kind carries caller
supplied derivative tables and is documented as mild-solution input.  Each
kind knows its own exact running sup so verification does not depend on the
sampling resolution, except for sampled data where the running sup is the
sample max (a lower bound on the true sup).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .state import simpson_weights


class BoundarySignal:
    """Scalar disturbance applied at the free end."""

    kind = "abstract"
    description = ""

    def value(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def running_sup(self, t: np.ndarray) -> np.ndarray:
        """sup of |d| over [0, t_i] for each requested time."""
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroBoundary(BoundarySignal):
    kind = "zero"
    description: str = ""

    def value(self, t):
        return np.zeros(np.shape(t))

    def running_sup(self, t):
        return np.zeros(np.shape(t))


@dataclass(frozen=True)
class SineBoundary(BoundarySignal):
    """amplitude * sin(frequency * t + phase); frequency 0 gives a constant."""

    amplitude: float
    frequency: float
    phase: float = 0.0
    kind = "sine"
    description: str = ""

    def __post_init__(self):
        if self.frequency < 0:
            raise ValueError("frequency must be >= 0")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.sin(self.frequency * t + self.phase)

    def running_sup(self, t):
        t = np.asarray(t, dtype=float)
        amp = abs(self.amplitude)
        if self.frequency == 0.0:
            return np.full(t.shape, amp * abs(math.sin(self.phase)))
        # first time |sin| peaks: frequency*t + phase = pi/2 (mod pi); before
        # that |sin| is V-shaped so the endpoint max is the running sup
        m = math.ceil((self.phase - math.pi / 2.0) / math.pi)
        t_crit = (math.pi / 2.0 + m * math.pi - self.phase) / self.frequency
        endpoint = np.maximum(np.abs(self.value(t)), abs(float(self.value(0.0))))
        return np.where(t >= t_crit, amp, endpoint)


@dataclass(frozen=True)
class DecayingExpBoundary(BoundarySignal):
    """amplitude * exp(-rate * t); rate 0 gives a constant."""

    amplitude: float
    rate: float
    kind = "decaying_exp"
    description: str = ""

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("decay rate must be >= 0")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.exp(-self.rate * t)

    def running_sup(self, t):
        return np.full(np.shape(t), abs(self.amplitude))


@dataclass(frozen=True)
class PolyPulseBoundary(BoundarySignal):
    """Polynomial bump amplitude * (4 s (1-s))^3 on s = (t-t0)/(t1-t0).

    Value, slope and curvature all vanish at both support edges, so the
    signal is C^2 across them; the peak value is exactly `amplitude` at the
    midpoint of the support.
    """

    t0: float
    t1: float
    amplitude: float
    kind = "poly_pulse"
    description: str = ""

    def __post_init__(self):
        if not (self.t1 > self.t0 >= 0.0):
            raise ValueError("pulse support needs t1 > t0 >= 0")

    def _bump(self, s):
        return (4.0 * s * (1.0 - s)) ** 3

    def value(self, t):
        t = np.asarray(t, dtype=float)
        s = (t - self.t0) / (self.t1 - self.t0)
        inside = (s > 0.0) & (s < 1.0)
        return np.where(inside, self.amplitude * self._bump(np.clip(s, 0.0, 1.0)), 0.0)

    def running_sup(self, t):
        t = np.asarray(t, dtype=float)
        t_mid = 0.5 * (self.t0 + self.t1)
        # |bump| rises monotonically up to the midpoint, then the sup sticks
        rising = np.clip((np.minimum(t, t_mid) - self.t0) / (self.t1 - self.t0), 0.0, 1.0)
        return abs(self.amplitude) * self._bump(rising)


@dataclass(frozen=True)
class SampledBoundary(BoundarySignal):
    """Linearly interpolated samples with caller-supplied derivative tables.

    The derivative tables document the claimed smoothness of the underlying
    signal; values outside the table range clamp to the end samples.  The
    running sup is the max over samples, a lower bound on the true sup.
    """

    times: np.ndarray
    values: np.ndarray
    dvalues: np.ndarray | None = None
    ddvalues: np.ndarray | None = None
    kind = "sampled"
    description: str = ""

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
            raise ValueError("sample times must be strictly increasing, >= 2 points")
        if values.shape != times.shape:
            raise ValueError("one value per sample time required")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def value(self, t):
        return np.interp(np.asarray(t, dtype=float), self.times, self.values)

    def running_sup(self, t):
        t = np.asarray(t, dtype=float)
        knot_cummax = np.maximum.accumulate(np.abs(self.values))
        idx = np.searchsorted(self.times, t, side="right") - 1
        knot_part = np.where(idx >= 0, knot_cummax[np.clip(idx, 0, None)], 0.0)
        return np.maximum.accumulate(np.maximum(knot_part, np.abs(self.value(t))))


@dataclass(frozen=True)
class SpatialProfile:
    """Square-integrable spatial profile sampled on its own uniform grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values)
        if values.shape != grid.shape:
            raise ValueError("profile values must match the profile grid")
        n = grid.size - 1
        if n < 2 or n % 2:
            raise ValueError("profile grid needs an even interval count >= 2")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def l2_norm(self) -> float:
        w = simpson_weights(self.grid.size - 1)
        return math.sqrt(max(float(np.sum(w * np.abs(self.values) ** 2)), 0.0))

    def sine_integral(self, k_tilde: float) -> float:
        """int profile(x) * sin(kt*pi*x) dx by Simpson on the profile grid."""
        w = simpson_weights(self.grid.size - 1)
        return float(np.sum(w * self.values * np.sin(k_tilde * math.pi * self.grid)))

    def on_grid(self, grid: np.ndarray) -> np.ndarray:
        grid = np.asarray(grid, dtype=float)
        if grid.size == self.grid.size and np.max(np.abs(grid - self.grid)) <= 1e-12:
            return np.asarray(self.values, dtype=float)
        return np.interp(grid, self.grid, self.values)


def sine_mode_profile(k: int, n: int = 256) -> SpatialProfile:
    """Profile sin((k + 1/2) * pi * x) on a uniform grid with n intervals."""
    grid = np.linspace(0.0, 1.0, n + 1)
    return SpatialProfile(grid=grid, values=np.sin((k + 0.5) * math.pi * grid))


class DistributedSignal:
    """In-domain disturbance u(t, x)."""

    kind = "abstract"

    def l2_norm_series(self, t: np.ndarray) -> np.ndarray:
        """||u(t_i)|| in L2(0,1) per requested time."""
        raise NotImplementedError

    def running_sup_l2(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroDistributed(DistributedSignal):
    kind = "zero"

    def l2_norm_series(self, t):
        return np.zeros(np.shape(t))

    def running_sup_l2(self, t):
        return np.zeros(np.shape(t))


@dataclass(frozen=True)
class SeparableDistributed(DistributedSignal):
    """profile(x) times a scalar time factor (any boundary-signal kind)."""

    profile: SpatialProfile
    time_factor: BoundarySignal
    kind = "separable"

    def l2_norm_series(self, t):
        return self.profile.l2_norm() * np.abs(self.time_factor.value(t))

    def running_sup_l2(self, t):
        return self.profile.l2_norm() * self.time_factor.running_sup(t)


@dataclass(frozen=True)
class SampledDistributed(DistributedSignal):
    """Time-by-space sample table, linear in time between rows.

    Spatial rows live on a uniform grid suitable for Simpson quadrature;
    sup-type norms are sample maxima (documented lower bounds).
    """

    times: np.ndarray
    grid: np.ndarray
    table: np.ndarray
    kind = "sampled"

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        grid = np.asarray(self.grid, dtype=float)
        table = np.asarray(self.table, dtype=float)
        if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
            raise ValueError("table times must be strictly increasing, >= 2 points")
        n = grid.size - 1
        if n < 2 or n % 2:
            raise ValueError("table grid needs an even interval count >= 2")
        if table.shape != (times.size, grid.size):
            raise ValueError("table must be (len(times), len(grid))")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "table", table)

    def row_norms(self) -> np.ndarray:
        w = simpson_weights(self.grid.size - 1)
        return np.sqrt(np.maximum((self.table ** 2) @ w, 0.0))

    def l2_norm_series(self, t):
        return np.interp(np.asarray(t, dtype=float), self.times, self.row_norms())

    def running_sup_l2(self, t):
        t = np.asarray(t, dtype=float)
        norms = self.row_norms()
        knot_cummax = np.maximum.accumulate(norms)
        idx = np.searchsorted(self.times, t, side="right") - 1
        knot_part = np.where(idx >= 0, knot_cummax[np.clip(idx, 0, None)], 0.0)
        return np.maximum.accumulate(np.maximum(knot_part, self.l2_norm_series(t)))

    def rows_on(self, grid: np.ndarray) -> np.ndarray:
        """Table resampled onto another spatial grid (linear interpolation)."""
        grid = np.asarray(grid, dtype=float)
        return np.vstack([np.interp(grid, self.grid, row) for row in self.table])

    def time_weights(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Indices and interpolation weights of each requested time in the table."""
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.times, t, side="right") - 1,
                      0, self.times.size - 2)
        span = self.times[idx + 1] - self.times[idx]
        w = np.clip((t - self.times[idx]) / span, 0.0, 1.0)
        return idx, w
