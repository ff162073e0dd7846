"""Closed-form eigenstructure of the clamped-free Kelvin-Voigt string.

Everything in this module is analytic: eigenvalues come from the quadratic

    P_k(X) = X^2 + kt^2*beta*pi^2 * X + kt^2*alpha*pi^2,     kt = k + 1/2,

eigenfunctions are sine/cosine profiles, and the dual (adjoint) family is
obtained by conjugation.  Mode pairs split at the cutoff index k0: below it
the roots are a complex-conjugate (underdamped) pair, at and above it two
negative reals (overdamped).  The branch is always selected by the integer
comparison k < k0, never by the sign of a floating-point discriminant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import AssumptionViolated, NonPositiveCoefficient, RieszConstantDegenerate

#: Default rejection tolerance on the distance of 2*sqrt(alpha)/(pi*beta) - 1/2
#: to the nearest nonnegative integer.
DEFAULT_ASSUMPTION_TOL = 1e-9


@dataclass(frozen=True)
class StringParams:
    """Validated physical coefficients with the derived cutoff index.

    alpha: stiffness coefficient (> 0, dimensionless after normalization).
    beta: Kelvin-Voigt damping coefficient (> 0).
    assumption_margin: distance of 2*sqrt(alpha)/(pi*beta) - 1/2 to the
        nearest nonnegative integer.
    k0: first overdamped mode index, ceil(2*sqrt(alpha)/(pi*beta) - 1/2),
        clamped below at 0.
    """

    alpha: float
    beta: float
    assumption_margin: float
    k0: int


@dataclass(frozen=True)
class ModeIndex:
    """A mode label (k, eps) with k >= 0 and eps in {-1, +1}."""

    k: int
    eps: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"mode index k must be >= 0, got {self.k}")
        if self.eps not in (-1, 1):
            raise ValueError(f"mode sign eps must be -1 or +1, got {self.eps}")

    @property
    def k_tilde(self) -> float:
        return self.k + 0.5


@dataclass(frozen=True)
class ModeData:
    """Spectral scalars of one mode.

    lam: eigenvalue of the disturbance-free generator.
    mu: eigenvalue of the adjoint (= conjugate of lam).
    phi_norm: H-norm of the raw eigenfunction phi.
    pairing: inner product of the unit eigenfunction with the raw dual
        eigenfunction; nonzero whenever the coefficients pass validation.
    gamma: boundary-gain coefficient of the mode,
        2*phi_norm / |Re(lam) * (1 - lam_other/lam)|.
    """

    index: ModeIndex
    lam: complex
    mu: complex
    phi_norm: float
    pairing: complex
    gamma: float


def validate_params(alpha: float, beta: float,
                    reject_tol: float = DEFAULT_ASSUMPTION_TOL) -> StringParams:
    """Check coefficient positivity and the non-resonance condition.

    Rejects coefficient pairs for which 2*sqrt(alpha)/(pi*beta) - 1/2 is
    within ``reject_tol`` of a nonnegative integer: there the two roots of
    some P_k collide and the biorthogonal pairing degenerates.
    """
    if not (alpha > 0):
        raise NonPositiveCoefficient(f"alpha must be > 0, got {alpha}")
    if not (beta > 0):
        raise NonPositiveCoefficient(f"beta must be > 0, got {beta}")
    if not (reject_tol > 0):
        raise NonPositiveCoefficient(f"reject_tol must be > 0, got {reject_tol}")
    q = 2.0 * math.sqrt(alpha) / (math.pi * beta) - 0.5
    nearest = max(0, round(q))
    margin = abs(q - nearest)
    if margin <= reject_tol:
        raise AssumptionViolated(
            f"2*sqrt(alpha)/(pi*beta) - 1/2 = {q!r} is within {reject_tol} of "
            f"the integer {nearest}; spectrum is nearly defective")
    k0 = max(0, math.ceil(q))
    return StringParams(alpha=float(alpha), beta=float(beta),
                        assumption_margin=margin, k0=k0)


def _poly_coeffs(params: StringParams, k_tilde: float) -> tuple[float, float]:
    """Coefficients (b, c) of P_k(X) = X^2 + b X + c."""
    b = k_tilde * k_tilde * params.beta * math.pi ** 2
    c = k_tilde * k_tilde * params.alpha * math.pi ** 2
    return b, c


def eigenvalue(params: StringParams, index: ModeIndex) -> complex:
    """Eigenvalue of the mode (k, eps).

    Underdamped branch (k < k0):
        -kt^2*beta*pi^2/2 + eps*i*(kt*pi/2)*sqrt(4*alpha - kt^2*beta^2*pi^2)
    Overdamped branch (k >= k0): both roots real.  The root near zero is
    obtained from the product of roots (lam_+ = c / lam_-) instead of the
    textbook quadratic formula, which would cancel catastrophically once
    kt^2*beta^2*pi^2 >> 4*alpha.
    """
    b, c = _poly_coeffs(params, index.k_tilde)
    if index.k < params.k0:
        imag = 0.5 * index.k_tilde * math.pi * math.sqrt(
            4.0 * params.alpha - index.k_tilde ** 2 * params.beta ** 2 * math.pi ** 2)
        return complex(-0.5 * b, index.eps * imag)
    root = math.sqrt(b * b - 4.0 * c)
    lam_minus = -0.5 * (b + root)
    if index.eps < 0:
        return complex(lam_minus, 0.0)
    return complex(c / lam_minus, 0.0)


def char_poly_residual(params: StringParams, index: ModeIndex, lam: complex) -> float:
    """Relative residual of the characteristic polynomial at ``lam``.

    |P_k(lam)| divided by the dominant scale max(1, |lam|^2, b*|lam|, c),
    so an eigenvalue accurate to machine precision scores ~1e-16 in every
    regime, including the overdamped root near zero where the polynomial's
    coefficients dwarf the root itself.
    """
    b, c = _poly_coeffs(params, index.k_tilde)
    value = abs(lam * lam + b * lam + c)
    scale = max(1.0, abs(lam) ** 2, b * abs(lam), c)
    return value / scale


@lru_cache(maxsize=None)
def _mode_data_cached(params: StringParams, k: int, eps: int) -> ModeData:
    index = ModeIndex(k, eps)
    lam = eigenvalue(params, index)
    lam_other = eigenvalue(params, ModeIndex(k, -eps))
    b, c = _poly_coeffs(params, index.k_tilde)
    phi_norm = math.sqrt(0.5 * (1.0 + c / abs(lam) ** 2))
    ratio = lam_other / lam
    pairing = (1.0 - ratio) / (2.0 * phi_norm)
    gamma = 2.0 * phi_norm / abs(lam.real * (1.0 - ratio))
    return ModeData(index=index, lam=lam, mu=lam.conjugate(),
                    phi_norm=phi_norm, pairing=pairing, gamma=gamma)


def mode_data(params: StringParams, index: ModeIndex) -> ModeData:
    """Eigenvalue, norms, dual pairing and gamma coefficient of one mode."""
    return _mode_data_cached(params, index.k, index.eps)


def cross_inner_product(params: StringParams, k: int) -> complex:
    """H-inner product of the two unit eigenfunctions sharing index k.

    (1 + c/(lam_- * conj(lam_+))) / sqrt((1 + c/|lam_-|^2)(1 + c/|lam_+|^2))
    with c = kt^2*alpha*pi^2; its modulus is < 1 for validated coefficients.
    """
    lam_p = eigenvalue(params, ModeIndex(k, +1))
    lam_m = eigenvalue(params, ModeIndex(k, -1))
    _, c = _poly_coeffs(params, k + 0.5)
    num = 1.0 + c / (lam_m * lam_p.conjugate())
    den = math.sqrt((1.0 + c / abs(lam_m) ** 2) * (1.0 + c / abs(lam_p) ** 2))
    return num / den


def riesz_constant(params: StringParams) -> float:
    """Constant C in (0, 1) bounding every |cross_inner_product(k)|.

    C = max( 2*sqrt(alpha)/(kt0*beta*pi),
             max over k < k0 of |cross_inner_product(k)| ),
    where kt0 = k0 + 1/2; the first term bounds the whole overdamped branch.
    The basis-sandwich constants are 1 - C and 1 + C.
    """
    kt0 = params.k0 + 0.5
    c_val = 2.0 * math.sqrt(params.alpha) / (kt0 * params.beta * math.pi)
    for k in range(params.k0):
        c_val = max(c_val, abs(cross_inner_product(params, k)))
    if c_val >= 1.0:
        raise RieszConstantDegenerate(
            f"basis constant C = {c_val} >= 1; tighten the validation tolerance")
    return c_val


def mode_list(truncation: int) -> tuple[ModeIndex, ...]:
    """Canonical mode enumeration (0,-1), (0,+1), (1,-1), ... up to k = truncation."""
    if truncation < 0:
        raise ValueError(f"truncation must be >= 0, got {truncation}")
    return tuple(ModeIndex(k, eps) for k in range(truncation + 1) for eps in (-1, +1))


@dataclass(frozen=True)
class EigenfunctionSamples:
    """Grid samples of one eigenfunction: first component, its analytic
    spatial derivative (cosine profile), and the second component."""

    x1: np.ndarray
    x1_prime: np.ndarray
    x2: np.ndarray


#: Selector values for :func:`eigenfunction_samples`.
EIGENFUNCTION_KINDS = ("primal_phi", "primal_Phi", "dual_psi", "dual_Psi")


def eigenfunction_samples(params: StringParams, index: ModeIndex,
                          grid: np.ndarray, which: str) -> EigenfunctionSamples:
    """Sample an eigenfunction of the generator or its adjoint on ``grid``.

    primal_phi:  (sin(kt*pi*x)/lam, sin(kt*pi*x))
    primal_Phi:  phi normalized to unit H-norm
    dual_psi:    (-sin(kt*pi*x)/mu, sin(kt*pi*x))
    dual_Psi:    psi scaled by 1/conj(pairing), biorthogonal to the Phi family

    Evaluation is analytic; the grid is only a sampling view.
    """
    if which not in EIGENFUNCTION_KINDS:
        raise ValueError(f"which must be one of {EIGENFUNCTION_KINDS}, got {which!r}")
    grid = np.asarray(grid, dtype=float)
    data = mode_data(params, index)
    kt_pi = index.k_tilde * math.pi
    s = np.sin(kt_pi * grid)
    c = np.cos(kt_pi * grid)
    if which.startswith("primal"):
        x1 = s / data.lam
        x1_prime = (kt_pi / data.lam) * c
        x2 = s.astype(complex)
        if which == "primal_Phi":
            x1 = x1 / data.phi_norm
            x1_prime = x1_prime / data.phi_norm
            x2 = x2 / data.phi_norm
    else:
        x1 = -s / data.mu
        x1_prime = -(kt_pi / data.mu) * c
        x2 = s.astype(complex)
        if which == "dual_Psi":
            scale = 1.0 / data.pairing.conjugate()
            x1 = x1 * scale
            x1_prime = x1_prime * scale
            x2 = x2 * scale
    return EigenfunctionSamples(x1=x1, x1_prime=x1_prime, x2=x2)


def dual_endpoint_value(params: StringParams, index: ModeIndex) -> complex:
    """Second component of the biorthogonal dual eigenfunction at x = 1.

    sin(kt*pi) = (-1)^k, so this is (-1)^k / conj(pairing); it drives the
    boundary-disturbance term of the modal ODE.
    """
    data = mode_data(params, index)
    sign = -1.0 if index.k % 2 else 1.0
    return sign / data.pairing.conjugate()


def gamma_sq_terms(params: StringParams, ks: np.ndarray,
                   dtype=float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (gamma_{k,+1}^2 + gamma_{k,-1}^2, sum of |Re lam|*gamma^2)
    per mode index, used by the certificate sums.

    Overdamped branch reductions (b, c, gap the quadratic data):
        gamma_eps^2 = 2 b / (|lam_eps| * gap^2),  |Re lam_eps| * gamma_eps^2 = 2 b / gap^2.
    Underdamped branch: gamma is eps-independent, 4*sqrt(c)/(b*sqrt(4c - b^2)).
    """
    ks = np.asarray(ks)
    kt = ks.astype(dtype) + dtype(0.5)
    pi2 = dtype(math.pi) ** 2
    b = kt * kt * dtype(params.beta) * pi2
    c = kt * kt * dtype(params.alpha) * pi2
    g2 = np.empty_like(b)
    wg2 = np.empty_like(b)
    under = ks < params.k0
    if np.any(under):
        bu, cu = b[under], c[under]
        sep_sq = 4.0 * cu - bu * bu
        gamma_sq = 16.0 * cu / (bu * bu * sep_sq)
        g2[under] = 2.0 * gamma_sq
        wg2[under] = bu * gamma_sq
    over = ~under
    if np.any(over):
        bo, co = b[over], c[over]
        gap = np.sqrt(bo * bo - 4.0 * co)
        abs_minus = 0.5 * (bo + gap)
        abs_plus = co / abs_minus
        common = 2.0 * bo / (gap * gap)
        g2[over] = common * (1.0 / abs_plus + 1.0 / abs_minus)
        wg2[over] = 2.0 * common
    return g2, wg2
