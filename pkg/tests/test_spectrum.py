import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kvstring import (AssumptionViolated, NonPositiveCoefficient,
                      validate_params)
from kvstring.certificate import decay_rate
from kvstring.spectrum import (ModeIndex, char_poly_residual,
                               cross_inner_product, eigenfunction_samples,
                               eigenvalue, gamma_sq_terms, mode_data,
                               mode_list, riesz_constant)

from conftest import PARAM_GRID
from oracles import (as_complex, mp_cross, mp_eigenvalue, mp_gamma,
                     mp_pairing, mp_phi_norm)

K_SAMPLES = [0, 1, 2, 3, 5, 10, 20, 50, 100, 200]


class TestValidateParams:
    def test_k0_examples(self):
        # 2/(2*pi) - 1/2 < 0 so the ceiling clamps at 0; 2/pi - 1/2 ~ 0.137
        assert validate_params(1.0, 2.0).k0 == 0
        assert validate_params(1.0, 1.0).k0 == 1
        assert validate_params(4.0, 1.0).k0 == 1
        assert validate_params(1.0, 0.1).k0 == 6

    def test_margin_values(self):
        p = validate_params(1.0, 2.0)
        assert p.assumption_margin == pytest.approx(0.5 - 1.0 / math.pi, rel=1e-12)
        p = validate_params(1.0, 1.0)
        assert p.assumption_margin == pytest.approx(2.0 / math.pi - 0.5, rel=1e-12)

    def test_exact_resonance_rejected(self):
        # alpha = (pi*beta*(m+1/2)/2)^2 puts the margin at 0 by construction
        for m in (0, 1, 3):
            alpha = (math.pi * 1.0 * (m + 0.5) / 2.0) ** 2
            with pytest.raises(AssumptionViolated):
                validate_params(alpha, 1.0)

    def test_near_resonance_rejected_by_tolerance(self):
        alpha = (math.pi * 0.75) ** 2 * (1.0 + 3e-10)
        with pytest.raises(AssumptionViolated):
            validate_params(alpha, 1.0, reject_tol=1e-9)

    @pytest.mark.parametrize("alpha,beta,tol", [(-1.0, 1.0, 1e-9), (0.0, 1.0, 1e-9),
                                                (1.0, -2.0, 1e-9), (1.0, 0.0, 1e-9),
                                                (1.0, 1.0, 0.0)])
    def test_nonpositive_rejected(self, alpha, beta, tol):
        with pytest.raises(NonPositiveCoefficient):
            validate_params(alpha, beta, tol)


class TestEigenvalues:
    def test_frozen_examples(self, params12, params11):
        # high-precision quadratic-solve values
        assert eigenvalue(params12, ModeIndex(0, +1)) == pytest.approx(
            -0.56459604211403933, rel=1e-14)
        assert eigenvalue(params12, ModeIndex(0, -1)) == pytest.approx(
            -4.37020615843064, rel=1e-14)
        lam = eigenvalue(params11, ModeIndex(0, +1))
        assert lam.real == pytest.approx(-1.2337005501361698, rel=1e-14)
        assert lam.imag == pytest.approx(0.97230862017471159, rel=1e-14)

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_against_quadratic_solve_oracle(self, alpha, beta):
        p = validate_params(alpha, beta)
        for k in K_SAMPLES:
            for eps in (-1, +1):
                got = eigenvalue(p, ModeIndex(k, eps))
                want = as_complex(mp_eigenvalue(alpha, beta, k, eps))
                assert got == pytest.approx(want, rel=1e-13, abs=1e-13)

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_branch_structure(self, alpha, beta):
        p = validate_params(alpha, beta)
        kt = lambda k: k + 0.5
        for k in range(0, max(p.k0 + 5, 10)):
            lam = eigenvalue(p, ModeIndex(k, +1))
            if k < p.k0:
                assert lam.imag != 0.0
                # underdamped modulus is exactly kt*pi*sqrt(alpha)
                assert abs(lam) == pytest.approx(
                    kt(k) * math.pi * math.sqrt(alpha), rel=1e-12)
                assert mode_data(p, ModeIndex(k, +1)).phi_norm == pytest.approx(1.0, rel=1e-12)
            else:
                assert lam.imag == 0.0
                assert lam.real < 0.0

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_spectral_bounds_and_attainment(self, alpha, beta):
        p = validate_params(alpha, beta)
        kappa0 = decay_rate(p)
        for k in K_SAMPLES:
            for eps in (-1, +1):
                lam = eigenvalue(p, ModeIndex(k, eps))
                assert lam.real <= -kappa0 * (1.0 - 1e-12)
        if p.k0 >= 1:
            assert eigenvalue(p, ModeIndex(0, +1)).real == pytest.approx(
                -beta * math.pi ** 2 / 8.0, rel=1e-14)

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_overdamped_plus_root_monotone_to_limit(self, alpha, beta):
        p = validate_params(alpha, beta)
        lams = [eigenvalue(p, ModeIndex(k, +1)).real for k in range(p.k0, p.k0 + 500)]
        assert all(a < b for a, b in zip(lams, lams[1:]))
        assert all(lam <= -alpha / beta + 1e-14 for lam in lams)
        assert lams[-1] == pytest.approx(-alpha / beta, rel=1e-3)


class TestCharPolyResidual:
    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_roots_have_tiny_residual(self, alpha, beta):
        p = validate_params(alpha, beta)
        for k in range(0, 201):
            for eps in (-1, +1):
                idx = ModeIndex(k, eps)
                assert char_poly_residual(p, idx, eigenvalue(p, idx)) <= 1e-12

    def test_non_root_values(self, params12, params11):
        # P_0(0) = c = pi^2/4 over scale max(1, c) = c
        assert char_poly_residual(params12, ModeIndex(0, +1), 0.0) == pytest.approx(1.0)
        # P_0(-1) = 1 - pi^2/4 + pi^2/4 = 1 over scale pi^2/4
        assert char_poly_residual(params11, ModeIndex(0, +1), -1.0) == pytest.approx(
            4.0 / math.pi ** 2, rel=1e-12)


class TestVieta:
    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_product_and_sum(self, alpha, beta):
        p = validate_params(alpha, beta)
        for k in range(0, 201):
            kt2 = (k + 0.5) ** 2
            prod_ref = kt2 * alpha * math.pi ** 2
            sum_ref = -kt2 * beta * math.pi ** 2
            lp = eigenvalue(p, ModeIndex(k, +1))
            lm = eigenvalue(p, ModeIndex(k, -1))
            assert abs(lp * lm - prod_ref) <= 1e-10 * prod_ref
            assert abs(lp + lm - sum_ref) <= 1e-10 * abs(sum_ref)


class TestModeData:
    def test_frozen_scalars(self, params12, params11):
        md = mode_data(params12, ModeIndex(0, +1))
        assert md.phi_norm == pytest.approx(2.0905038049309166, rel=1e-13)
        assert md.gamma == pytest.approx(1.0986431825834473, rel=1e-13)
        assert md.pairing == pytest.approx(-1.6121502149296555 + 0j, rel=1e-13)
        md = mode_data(params11, ModeIndex(0, +1))
        assert md.phi_norm == pytest.approx(1.0, rel=1e-13)
        assert md.pairing == pytest.approx(
            0.38314972493191509 - 0.4861543100873558j, rel=1e-13)

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_against_formula_oracle(self, alpha, beta):
        p = validate_params(alpha, beta)
        for k in (0, 1, 3, 7, 25):
            for eps in (-1, +1):
                md = mode_data(p, ModeIndex(k, eps))
                assert md.mu == md.lam.conjugate()
                assert md.pairing != 0
                assert md.phi_norm == pytest.approx(
                    float(mp_phi_norm(alpha, beta, k, eps)), rel=1e-12)
                assert md.pairing == pytest.approx(
                    as_complex(mp_pairing(alpha, beta, k, eps)), rel=1e-12)
                assert md.gamma == pytest.approx(
                    float(mp_gamma(alpha, beta, k, eps)), rel=1e-12)

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_gamma_sq_terms_match_mode_data(self, alpha, beta):
        p = validate_params(alpha, beta)
        ks = np.array([0, 1, 2, 5, 17, 60])
        g2, wg2 = gamma_sq_terms(p, ks)
        for i, k in enumerate(ks):
            gp = mode_data(p, ModeIndex(int(k), +1)).gamma
            gm = mode_data(p, ModeIndex(int(k), -1)).gamma
            lp = eigenvalue(p, ModeIndex(int(k), +1))
            lm = eigenvalue(p, ModeIndex(int(k), -1))
            assert g2[i] == pytest.approx(gp ** 2 + gm ** 2, rel=1e-11)
            assert wg2[i] == pytest.approx(
                abs(lp.real) * gp ** 2 + abs(lm.real) * gm ** 2, rel=1e-11)


class TestCrossInnerProduct:
    def test_overdamped_closed_form(self, params12):
        # real branch collapses to 2*sqrt(alpha)/(kt*beta*pi)
        assert cross_inner_product(params12, 0) == pytest.approx(2.0 / math.pi, rel=1e-13)
        assert cross_inner_product(params12, 5) == pytest.approx(
            2.0 / (5.5 * 2.0 * math.pi), rel=1e-13)

    def test_underdamped_is_strictly_complex(self, params11):
        z = cross_inner_product(params11, 0)
        assert abs(z) < 1.0
        assert z.imag != 0.0

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_against_oracle(self, alpha, beta):
        p = validate_params(alpha, beta)
        for k in (0, 1, 2, 4, 9, 33):
            assert cross_inner_product(p, k) == pytest.approx(
                as_complex(mp_cross(alpha, beta, k)), rel=1e-12)


class TestRieszConstant:
    def test_values(self, params12, params11):
        assert riesz_constant(params12) == pytest.approx(2.0 / math.pi, rel=1e-13)
        # max(2/(1.5*pi), |cross(0)|) with the underdamped k=0 term winning
        assert riesz_constant(params11) == pytest.approx(0.78539816339744831, rel=1e-13)

    def test_small_alpha_direction(self):
        p = validate_params(0.01, 1.0)
        assert riesz_constant(p) == pytest.approx(0.12732395447351627, rel=1e-13)

    @pytest.mark.parametrize("alpha,beta", PARAM_GRID)
    def test_bounds_every_cross_product(self, alpha, beta):
        p = validate_params(alpha, beta)
        c_val = riesz_constant(p)
        assert 0.0 < c_val < 1.0
        for k in range(0, 40):
            assert abs(cross_inner_product(p, k)) <= c_val * (1.0 + 1e-12)
        # the overdamped bound term is attained exactly at k = k0
        kt0 = p.k0 + 0.5
        assert abs(cross_inner_product(p, p.k0)) == pytest.approx(
            2.0 * math.sqrt(alpha) / (kt0 * beta * math.pi), rel=1e-12)


class TestEigenfunctionSamples:
    def test_boundary_profile_values(self, params12, grid1024):
        s = eigenfunction_samples(params12, ModeIndex(2, +1), grid1024, "primal_phi")
        assert s.x1[0] == 0.0  # clamped end
        assert abs(s.x1_prime[-1]) <= 1e-12  # cosine vanishes at the free end
        assert s.x2[0] == 0.0

    def test_dual_endpoint(self, params11, grid1024):
        s = eigenfunction_samples(params11, ModeIndex(0, +1), grid1024, "dual_Psi")
        pairing = mode_data(params11, ModeIndex(0, +1)).pairing
        assert s.x2[-1] == pytest.approx(1.0 / pairing.conjugate(), rel=1e-12)

    def test_scalings_are_consistent(self, params12, grid1024):
        idx = ModeIndex(1, -1)
        md = mode_data(params12, idx)
        raw = eigenfunction_samples(params12, idx, grid1024, "primal_phi")
        unit = eigenfunction_samples(params12, idx, grid1024, "primal_Phi")
        assert np.allclose(raw.x2 / md.phi_norm, unit.x2)
        raw_d = eigenfunction_samples(params12, idx, grid1024, "dual_psi")
        scaled = eigenfunction_samples(params12, idx, grid1024, "dual_Psi")
        assert np.allclose(raw_d.x1_prime / md.pairing.conjugate(), scaled.x1_prime)

    def test_unknown_kind_rejected(self, params12, grid1024):
        with pytest.raises(ValueError):
            eigenfunction_samples(params12, ModeIndex(0, 1), grid1024, "primal")


class TestPairingNormIdentity:
    @pytest.mark.parametrize("alpha,beta", [(1.0, 2.0), (1.0, 1.0), (4.0, 1.0)])
    def test_dual_l2_norm_closed_form(self, alpha, beta):
        # ||Psi2||_L2 computed by quadrature equals gamma*|Re lam|/sqrt(2)
        from scipy.integrate import quad
        p = validate_params(alpha, beta)
        for k in (0, 1, 4):
            for eps in (-1, +1):
                md = mode_data(p, ModeIndex(k, eps))
                scale = 1.0 / abs(md.pairing)
                val, _ = quad(lambda x: (math.sin((k + 0.5) * math.pi * x) * scale) ** 2,
                              0.0, 1.0, limit=100)
                lhs = math.sqrt(val)
                rhs = md.gamma * abs(md.lam.real) / math.sqrt(2.0)
                assert lhs == pytest.approx(rhs, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(alpha=st.floats(0.05, 20.0), beta=st.floats(0.05, 5.0),
       k=st.integers(0, 300), eps=st.sampled_from([-1, 1]))
def test_root_property_any_coefficients(alpha, beta, k, eps):
    try:
        p = validate_params(alpha, beta, reject_tol=1e-6)
    except AssumptionViolated:
        return
    idx = ModeIndex(k, eps)
    assert char_poly_residual(p, idx, eigenvalue(p, idx)) <= 1e-12


def test_mode_list_order():
    modes = mode_list(2)
    assert [(m.k, m.eps) for m in modes] == [(0, -1), (0, 1), (1, -1), (1, 1), (2, -1), (2, 1)]
    assert modes[1].k_tilde == 0.5
