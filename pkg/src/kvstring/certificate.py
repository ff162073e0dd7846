"""Stability certificate: decay rate, gain constants, and trajectory checks.

The certificate packages the exponential decay rate of the undisturbed
semigroup together with five gain constants.  With C the basis constant and
gamma, gamma' the two summed gain sequences,

    c0 = sqrt(3 (1+C)/(1-C))        c1 = gamma  * sqrt(3 (1+C))
    c2 = gamma  * sqrt(3 (1+C)/2)   c3 = gamma' * sqrt(3 (1+C)/2)
    c4 = (gamma'/2) * sqrt(3 (1+C))

and every trajectory norm is bounded by

    c0 e^{-kappa0 t} |X0|  +  c1 sup|d|  + c2 sup|u|      (uniform form)
    c0 e^{-kappa0 t} |X0|  +  c3 |d|_L2  + c4 |u|_L2      (L2 form).

The gamma sums are evaluated explicitly until an asymptotic envelope of the
remainder (safety factor 4) drops below the requested relative tolerance;
the envelope is then added, so the returned value overshoots the true sum
by at most roughly the tolerance itself.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import HorizonTooShort
from .modal import Trajectory
from .spectrum import StringParams, gamma_sq_terms, riesz_constant

#: Explicit summation never stops before this many indices (times max(k0, 100)/100).
_MIN_EXPLICIT_FACTOR = 10
_CHUNK = 1 << 18


def decay_rate(params: StringParams) -> float:
    """Exponential decay rate kappa0 of the disturbance-free semigroup:
    min(beta*pi^2/8, alpha/beta) once overdamping starts past mode 0,
    alpha/beta when every mode is overdamped."""
    ratio = params.alpha / params.beta
    if params.k0 >= 1:
        return min(params.beta * math.pi ** 2 / 8.0, ratio)
    return ratio


def _summed(params: StringParams, rel_tol: float,
            weighted: bool) -> tuple[float, int, float]:
    """Shared driver for the gamma sums.

    Adds gamma_{k,eps}^2 (or |Re lam|*gamma^2) in chunks until the envelope
    tail is below rel_tol times the partial sum, then adds the envelope.
    Returns (sum incl. tail, modes summed, tail added).
    """
    if not rel_tol > 0:
        raise ValueError("rel_tol must be > 0")
    min_k = _MIN_EXPLICIT_FACTOR * max(params.k0, 100)

    def envelope(n: int) -> float:
        if weighted:
            return 16.0 / (params.beta * math.pi ** 2 * n)
        return 4.0 * (2.0 / (params.alpha * math.pi ** 2 * n)
                      + 2.0 / (3.0 * params.beta ** 2 * math.pi ** 4 * n ** 3))

    partial = 0.0
    k_next = 0
    while True:
        ks = np.arange(k_next, k_next + _CHUNK)
        g2, wg2 = gamma_sq_terms(params, ks)
        partial += float(np.sum(wg2 if weighted else g2))
        k_next += _CHUNK
        if k_next >= min_k and envelope(k_next) <= rel_tol * partial:
            break
    tail = envelope(k_next)
    return partial + tail, k_next, tail


def gamma_sum(params: StringParams, rel_tol: float = 1e-6) -> tuple[float, int, float]:
    """(gamma, modes summed, tail estimate) with gamma^2 the sum of all
    squared mode gains."""
    total, modes, tail = _summed(params, rel_tol, weighted=False)
    return math.sqrt(total), modes, tail


def gamma_prime_sum(params: StringParams,
                    rel_tol: float = 1e-6) -> tuple[float, int, float]:
    """(gamma', modes summed, tail estimate) with the |Re lam|-weighted terms."""
    total, modes, tail = _summed(params, rel_tol, weighted=True)
    return math.sqrt(total), modes, tail


@dataclass(frozen=True)
class IssCertificate:
    """Decay rate, basis constant, gain sums and the five bound constants."""

    kappa0: float
    riesz_c: float
    gamma: float
    gamma_prime: float
    c0: float
    c1: float
    c2: float
    c3: float
    c4: float
    tail_modes: int
    tail_estimate: float

    def to_json(self, path=None) -> str:
        text = json.dumps(asdict(self), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def certificate(params: StringParams, rel_tol: float = 1e-6) -> IssCertificate:
    """Assemble the full certificate at the requested gain-sum tolerance."""
    c_val = riesz_constant(params)
    gamma, modes_g, tail_g = gamma_sum(params, rel_tol)
    gamma_p, modes_gp, tail_gp = gamma_prime_sum(params, rel_tol)
    big = 1.0 + c_val
    return IssCertificate(
        kappa0=decay_rate(params),
        riesz_c=c_val,
        gamma=gamma,
        gamma_prime=gamma_p,
        c0=math.sqrt(3.0 * big / (1.0 - c_val)),
        c1=gamma * math.sqrt(3.0 * big),
        c2=gamma * math.sqrt(1.5 * big),
        c3=gamma_p * math.sqrt(1.5 * big),
        c4=0.5 * gamma_p * math.sqrt(3.0 * big),
        tail_modes=min(modes_g, modes_gp),
        tail_estimate=max(tail_g, tail_gp),
    )


def iss_bound_uniform(cert: IssCertificate, x0_norm: float, d_sup, u_sup, t):
    """Right-hand side of the sup-norm estimate (vectorized over t)."""
    return cert.c0 * np.exp(-cert.kappa0 * np.asarray(t)) * x0_norm \
        + cert.c1 * np.asarray(d_sup) + cert.c2 * np.asarray(u_sup)


def iss_bound_l2(cert: IssCertificate, x0_norm: float, d_l2, u_l2, t):
    """Right-hand side of the L2-norm estimate (vectorized over t)."""
    return cert.c0 * np.exp(-cert.kappa0 * np.asarray(t)) * x0_norm \
        + cert.c3 * np.asarray(d_l2) + cert.c4 * np.asarray(u_l2)


@dataclass
class VerificationReport:
    """Pointwise comparison of a trajectory against both estimates."""

    scenario: str
    cert: IssCertificate
    worst_uniform_margin: float
    worst_l2_margin: float
    worst_uniform_ratio: float
    worst_l2_ratio: float
    violations: list[dict]
    uniform_bounds: np.ndarray
    l2_bounds: np.ndarray

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "certificate": asdict(self.cert),
            "worst_uniform_margin": self.worst_uniform_margin,
            "worst_l2_margin": self.worst_l2_margin,
            "worst_uniform_ratio": self.worst_uniform_ratio,
            "worst_l2_ratio": self.worst_l2_ratio,
            "violations": self.violations,
        }


def verify_trajectory(traj: Trajectory, cert: IssCertificate,
                      scenario: str = "", guard: float = 1e-3) -> VerificationReport:
    """Check the trajectory norm against both bounds at every output time.

    A point is only flagged as a violation when the norm exceeds the bound
    by more than ``guard`` relative: sup norms of sampled signals are sample
    maxima, so the computed bound can undershoot the true one by a
    resolution-linked sliver.  Violations are report content, not errors.
    """
    ub = iss_bound_uniform(cert, traj.x0_norm, traj.d_sup, traj.u_sup, traj.times)
    lb = iss_bound_l2(cert, traj.x0_norm, traj.d_l2, traj.u_l2, traj.times)
    violations = []
    for name, bounds in (("uniform", ub), ("l2", lb)):
        over = traj.h_norms > bounds * (1.0 + guard)
        for i in np.flatnonzero(over):
            violations.append({"estimate": name, "t": float(traj.times[i]),
                               "norm": float(traj.h_norms[i]),
                               "bound": float(bounds[i])})
    with np.errstate(divide="ignore", invalid="ignore"):
        ur = np.where(ub > 0, traj.h_norms / ub, 0.0)
        lr = np.where(lb > 0, traj.h_norms / lb, 0.0)
    return VerificationReport(
        scenario=scenario, cert=cert,
        worst_uniform_margin=float(np.min(ub - traj.h_norms)),
        worst_l2_margin=float(np.min(lb - traj.h_norms)),
        worst_uniform_ratio=float(np.max(ur)),
        worst_l2_ratio=float(np.max(lr)),
        violations=violations,
        uniform_bounds=ub, l2_bounds=lb)


def asymptotic_check(traj: Trajectory,
                     window_fraction: float = 0.2) -> tuple[float, float, float]:
    """(peak norm, late-window max norm, their ratio).

    The late window is the final ``window_fraction`` of the horizon; a small
    ratio witnesses convergence to zero for vanishing or finite-energy
    disturbances, a ratio near 1 a persistently excited string.
    """
    if not 0 < window_fraction < 1:
        raise ValueError("window_fraction must be in (0, 1)")
    kappa0 = decay_rate(traj.params)
    t_end = float(traj.times[-1])
    if t_end < 3.0 / kappa0:
        raise HorizonTooShort(
            f"horizon {t_end:g} is shorter than 3/kappa0 = {3.0 / kappa0:g}")
    peak = float(np.max(traj.h_norms))
    cut = t_end * (1.0 - window_fraction)
    late = float(np.max(traj.h_norms[traj.times >= cut]))
    ratio = late / peak if peak > 0 else 0.0
    return peak, late, ratio
