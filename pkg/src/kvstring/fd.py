"""Independent finite-difference oracle for the damped string.

Semi-discretization in space with the staggered Kelvin-Voigt flux

    F_{j+1/2} = (alpha*(y_{j+1} - y_j) + beta*(v_{j+1} - v_j)) / h,

clamped left node, and the free-end condition imposed as a ghost flux equal
to d(t) on the half cell of the last node.  With node masses h (interior)
and h/2 (free end), the discrete operator is symmetric dissipative in the
discrete energy

    E = alpha * sum_faces |dy/h|^2 h  +  sum_j m_j |v_j|^2,

which decays exactly along the semi-discrete flow when the disturbances
vanish; the trapezoidal (Crank-Nicolson) step preserves that contraction,
so the scheme is A-stable against the O(nx^2) stiffness of the damping
term.  This module exists purely to cross-validate the spectral solver.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.integrate import cumulative_trapezoid
from scipy.sparse.linalg import splu

from .errors import StepUnstableOrSingular
from .modal import SimulationConfig, Trajectory, _running_disturbance_norms, \
    check_compatibility
from .errors import CompatibilityViolated
from .signals import SampledDistributed, SeparableDistributed, ZeroDistributed
from .state import StateVector, boundary_trace, h_norm
from .spectrum import StringParams


@dataclass(frozen=True)
class FdConfig:
    """Spatial resolution and time step of the finite-difference run."""

    nx: int
    dt: float
    store_states: bool = False

    def __post_init__(self):
        if self.nx < 32:
            raise ValueError(f"nx must be >= 32, got {self.nx}")
        if not self.dt > 0:
            raise ValueError("dt must be > 0")


def _stencil(nx: int) -> sp.csr_matrix:
    """Flux-difference operator on nodes 1..nx (node 0 eliminated).

    Interior rows are the standard second difference / h^2; the last row is
    the half-cell form -2*(q_nx - q_{nx-1})/h^2.  The boundary datum enters
    separately through the ghost-flux load vector.
    """
    h = 1.0 / nx
    main = np.full(nx, -2.0)
    lower = np.ones(nx - 1)
    upper = np.ones(nx - 1)
    lower[-1] = 2.0  # half cell at the free end
    mat = sp.diags([lower, main, upper], [-1, 0, 1], format="csr")
    return mat / (h * h)


def _discrete_energy(y: np.ndarray, v: np.ndarray, params: StringParams,
                     nx: int) -> float:
    """Energy-norm square with the scheme's own face/node weights."""
    h = 1.0 / nx
    dy = np.diff(y) / h
    masses = np.full(nx + 1, h)
    masses[0] = 0.0
    masses[-1] = 0.5 * h
    e = params.alpha * float(np.sum(np.abs(dy) ** 2) * h) \
        + float(np.sum(masses * np.abs(v) ** 2))
    return max(e, 0.0)


def _initial_arrays(config: SimulationConfig, grid: np.ndarray):
    """Initial (y, v) on the FD grid, resampling the state if grids differ."""
    init = config.initial
    same = init.grid.size == grid.size and np.max(np.abs(init.grid - grid)) <= 1e-12
    if same:
        x1p = init.x1_prime
        v = init.x2
    else:
        def interp(vals):
            if np.iscomplexobj(vals):
                return np.interp(grid, init.grid, vals.real) \
                    + 1j * np.interp(grid, init.grid, vals.imag)
            return np.interp(grid, init.grid, vals)
        x1p = interp(init.x1_prime)
        v = interp(init.x2)
    y = cumulative_trapezoid(x1p, grid, initial=0.0)
    return y, v


def _distributed_rows(u, grid: np.ndarray, step_times: np.ndarray):
    """Per-step access to u(t_n, grid) without materializing the full table."""
    if isinstance(u, ZeroDistributed):
        return None
    if isinstance(u, SeparableDistributed):
        profile = u.profile.on_grid(grid)
        g = u.time_factor.value(step_times)
        return lambda n: profile * g[n]
    if isinstance(u, SampledDistributed):
        rows = u.rows_on(grid)
        idx, w = u.time_weights(step_times)
        return lambda n: (1.0 - w[n]) * rows[idx[n]] + w[n] * rows[idx[n] + 1]
    raise TypeError(f"unsupported distributed signal {type(u).__name__}")


def simulate_fd(config: SimulationConfig, fd: FdConfig) -> Trajectory:
    """Trapezoidal time stepping of the semi-discrete string.

    Emits the same trajectory shape as the spectral solver (no modal
    coefficients); states are converted back to StateVector samples only
    when ``fd.store_states`` is set.
    """
    params = config.params
    if not check_compatibility(config.initial, config.d, params, config.compat_tol):
        trace = boundary_trace(config.initial, params)
        raise CompatibilityViolated(
            f"initial boundary trace {trace:.6g} != d(0) beyond tolerance")

    nx = fd.nx
    h = 1.0 / nx
    grid = np.linspace(0.0, 1.0, nx + 1)
    stride = int(round(config.dt / fd.dt))
    if stride < 1 or abs(stride * fd.dt - config.dt) > 1e-9 * config.dt:
        raise ValueError("output step dt must be an integer multiple of fd.dt")
    n_out = int(round(config.t_end / config.dt))
    n_steps = n_out * stride
    step_times = fd.dt * np.arange(n_steps + 1)

    y_full, v_full = _initial_arrays(config, grid)
    complex_run = np.iscomplexobj(y_full) or np.iscomplexobj(v_full)
    dtype = complex if complex_run else float
    y = np.asarray(y_full[1:], dtype=dtype).copy()
    v = np.asarray(v_full[1:], dtype=dtype).copy()

    lap = _stencil(nx)
    theta = params.alpha * fd.dt ** 2 / 4.0 + params.beta * fd.dt / 2.0
    eye = sp.identity(nx, format="csr")
    try:
        solver = splu((eye - theta * lap).astype(dtype).tocsc())
    except RuntimeError as exc:  # pragma: no cover - matrix is an M-matrix
        raise StepUnstableOrSingular(str(exc)) from exc
    rhs_mat = (eye + theta * lap).tocsr()

    d_steps = np.asarray(config.d.value(step_times), dtype=float)
    u_rows = _distributed_rows(config.u, grid, step_times)
    ghost = np.zeros(nx)
    ghost[-1] = 2.0 / h  # ghost flux d(t) over the half cell

    def load(n: int):
        f = ghost * d_steps[n]
        if u_rows is not None:
            f = f + u_rows(n)[1:]
        return f

    h_norms = np.empty(n_out + 1)
    h_norms[0] = np.sqrt(_discrete_energy(np.concatenate(([0.0], y)),
                                          np.concatenate(([0.0], v)), params, nx))
    states: list[StateVector] | None = [] if fd.store_states else None
    if states is not None:
        states.append(_to_state(grid, y, v, dtype))

    f_curr = load(0)
    out_idx = 0
    for n in range(n_steps):
        f_next = load(n + 1)
        rhs = rhs_mat @ v + fd.dt * params.alpha * (lap @ y) \
            + 0.5 * fd.dt * (f_curr + f_next)
        v_new = solver.solve(rhs)
        y = y + 0.5 * fd.dt * (v + v_new)
        v = v_new
        f_curr = f_next
        if (n + 1) % stride == 0:
            out_idx += 1
            if not np.all(np.isfinite(v)):
                raise StepUnstableOrSingular(
                    f"non-finite solution at t = {step_times[n + 1]:.6g}")
            h_norms[out_idx] = np.sqrt(_discrete_energy(
                np.concatenate(([0.0], y)), np.concatenate(([0.0], v)), params, nx))
            if states is not None:
                states.append(_to_state(grid, y, v, dtype))

    d_sup, u_sup, d_l2, u_l2 = _running_disturbance_norms(
        config.d, config.u, step_times, stride)
    return Trajectory(params=params, solver="fd",
                      times=config.dt * np.arange(n_out + 1),
                      h_norms=h_norms, d_sup=d_sup, u_sup=u_sup,
                      d_l2=d_l2, u_l2=u_l2, x0_norm=h_norms[0],
                      states=states)


def _to_state(grid: np.ndarray, y_inner: np.ndarray, v_inner: np.ndarray,
              dtype) -> StateVector:
    """Convert FD arrays to a StateVector: x1' by centered differences of y
    (one-sided second order at the ends), x2 = v."""
    y = np.concatenate(([0.0], y_inner)).astype(dtype)
    v = np.concatenate(([0.0], v_inner)).astype(complex)
    h = grid[1] - grid[0]
    x1p = np.gradient(y, h, edge_order=2).astype(complex)
    return StateVector(grid=grid, x1_prime=x1p, x2=v)


def energy_series(traj: Trajectory) -> np.ndarray:
    """Squared energy norm per output time.

    Uses materialized states (Simpson quadrature) when present, otherwise
    the norms recorded while stepping.
    """
    if traj.states:
        return np.array([h_norm(s, traj.params) ** 2 for s in traj.states])
    return traj.h_norms ** 2
