import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qthermo import channel, operators as op, states
from qthermo.errors import DomainError, NumericError

from conftest import BETAS, FAMILY_SPECS, random_density


def coth(x):
    return (math.exp(2 * x) + 1.0) / (math.exp(2 * x) - 1.0)


class TestChannelParams:
    def test_t_zero(self):
        pr = channel.channel_params(channel.BathSpec(0.5, 1.0), 0.0)
        assert pr.p == 0.0
        assert pr.q == pytest.approx(1.0 / (1.0 + math.exp(-0.5)), abs=1e-14)
        assert pr.lam == pytest.approx(-coth(0.25), abs=1e-12)

    def test_finite_time_mixing(self):
        pr = channel.channel_params(channel.BathSpec(0.5, 1.0), 0.1)
        assert pr.p == pytest.approx(1.0 - math.exp(-coth(0.25) * 0.1), abs=1e-12)

    def test_long_time_limit(self):
        pr = channel.channel_params(channel.BathSpec(0.5, 1.0), 100.0)
        assert pr.p == pytest.approx(1.0, abs=1e-12)

    def test_gamma_scales_rate(self):
        assert channel.BathSpec(0.5, 2.0).lam == pytest.approx(-2.0 * coth(0.25), abs=1e-12)

    def test_rejects_bad_bath(self):
        with pytest.raises(DomainError):
            channel.BathSpec(0.0, 1.0)
        with pytest.raises(DomainError):
            channel.BathSpec(0.5, -1.0)
        with pytest.raises(DomainError):
            channel.channel_params(channel.BathSpec(0.5), -0.1)


class TestLindbladRates:
    def test_detailed_balance(self):
        rates = channel.lindblad_rates(channel.BathSpec(0.7, 1.3))
        assert rates.excitation / rates.decay == pytest.approx(math.exp(-0.7), abs=1e-12)
        assert rates.decay > rates.excitation > 0

    def test_total_rate_matches_lambda(self):
        bath = channel.BathSpec(0.9, 0.8)
        rates = channel.lindblad_rates(bath)
        assert rates.decay + rates.excitation == pytest.approx(abs(bath.lam), abs=1e-12)


class TestKrausOps:
    def test_p_zero_is_identity_channel(self):
        ks = channel.kraus_ops(channel.ChannelParams(p=0.0, q=0.37, lam=-1.0, t=0.0))
        rho = random_density(1, seed=2)
        out = sum(k @ rho.mat @ k.conj().T for k in ks)
        assert np.max(np.abs(out - rho.mat)) < 1e-15

    def test_full_mixing_on_excited_state(self):
        q = 1.0 / (1.0 + math.exp(-0.5))
        ks = channel.kraus_ops(channel.ChannelParams(p=1.0, q=q, lam=-1.0, t=1.0))
        excited = np.diag([0.0, 1.0]).astype(complex)
        out = sum(k @ excited @ k.conj().T for k in ks)
        assert np.allclose(np.diag(out).real, [q, 1.0 - q], atol=1e-14)

    def test_completeness_on_grid(self):
        for p in np.linspace(0.0, 1.0, 11):
            for q in np.linspace(0.0, 1.0, 11):
                ks = channel.kraus_ops(channel.ChannelParams(float(p), float(q), -1.0, 0.0))
                acc = sum(k.conj().T @ k for k in ks)
                assert np.max(np.abs(acc - np.eye(2))) <= 1e-14


class TestSingleQubitEvolution:
    def test_thermal_fixed_point(self):
        q = 1.0 / (1.0 + math.exp(-0.5))
        fixed = op.from_matrix(np.diag([q, 1.0 - q]).astype(complex))
        for p in (0.1, 0.5, 0.99):
            out = channel.evolve_single_closed(fixed, channel.ChannelParams(p, q, -1.0, 0.0))
            assert np.max(np.abs(out.mat - fixed.mat)) < 1e-12

    def test_coherence_scaling(self):
        bath = channel.BathSpec(0.5, 1.0)
        pr = channel.channel_params(bath, 0.1)
        plus = states.product_state(0.5, 1.0, 0.0, 1)
        out = channel.evolve_single_closed(plus, pr)
        assert abs(out.mat[0, 1]) == pytest.approx(0.5 * math.sqrt(1.0 - pr.p), abs=1e-12)

    def test_full_damping_reaches_diag_q(self):
        q = 1.0 / (1.0 + math.exp(-0.5))
        rho = states.product_state(0.8, 0.9, 0.3, 1)
        out = channel.evolve_single_closed(rho, channel.ChannelParams(1.0, q, -1.0, 0.0))
        assert np.allclose(out.mat, np.diag([q, 1.0 - q]), atol=1e-14)

    def test_lindblad_matches_closed_form_magnitudes(self):
        bath = channel.BathSpec(0.5, 1.0)
        rho = states.product_state(0.5, 1.0, 0.0, 1)
        t = 0.1
        lam = -coth(0.25)
        out = channel.evolve_single_lindblad(rho, bath, t)
        assert abs(out.mat[0, 1]) == pytest.approx(0.5 * math.exp(lam * t / 2.0), abs=1e-12)
        # lab-frame phase e^{-it} on the upper off-diagonal entry
        assert np.angle(out.mat[0, 1]) == pytest.approx(-t, abs=1e-12)

    def test_lindblad_ground_population(self):
        bath = channel.BathSpec(0.5, 1.0)
        t = 0.1
        lam = -coth(0.25)
        pi0 = 1.0 / (1.0 + math.exp(-0.5))
        out = channel.evolve_single_lindblad(states.ground_state(1), bath, t)
        want = (1.0 - math.exp(lam * t)) * pi0 + math.exp(lam * t)
        assert out.mat[0, 0].real == pytest.approx(want, abs=1e-12)

    def test_lindblad_t_zero_is_identity(self):
        rho = states.product_state(0.3, 0.7, 0.9, 1)
        out = channel.evolve_single_lindblad(rho, channel.BathSpec(0.5), 0.0)
        assert np.max(np.abs(out.mat - rho.mat)) < 1e-15

    @pytest.mark.parametrize("beta", BETAS)
    @pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("t", [0.05, 0.4, 2.0])
    def test_kraus_lindblad_consistency_grid(self, beta, gamma, t):
        bath = channel.BathSpec(beta, gamma)
        rho = states.product_state(0.3, 0.8, 0.6, 1)
        a = channel.evolve_single_closed(rho, channel.channel_params(bath, t)).mat
        b = channel.evolve_single_lindblad(rho, bath, t).mat
        assert np.max(np.abs(np.diag(a - b))) < 1e-12
        assert np.max(np.abs(np.abs(a) - np.abs(b))) < 1e-12

    def test_semigroup_composition(self):
        bath = channel.BathSpec(0.4, 1.0)
        rho = states.product_state(0.2, 0.7, 0.1, 1)
        for t1, t2 in ((0.3, 0.5), (0.1, 1.7)):
            step = channel.evolve_single_closed(
                channel.evolve_single_closed(rho, channel.channel_params(bath, t1)),
                channel.channel_params(bath, t2),
            )
            direct = channel.evolve_single_closed(rho, channel.channel_params(bath, t1 + t2))
            assert np.max(np.abs(step.mat - direct.mat)) < 1e-12


class TestEnsembleEvolution:
    def test_t_zero_identity(self, family_spec):
        rho = states.build_state(family_spec)
        out = channel.evolve_ensemble(rho, channel.BathSpec(0.5), 0.0)
        assert np.max(np.abs(out.mat - rho.mat)) < 1e-14

    def test_asymptotic_thermal_product(self, family_spec):
        # single-qubit coherences decay at |lam|/2, half the population rate,
        # so elementwise 1e-8 needs roughly twice the population horizon
        bath = channel.BathSpec(0.5, 1.0)
        t = 40.0 / abs(bath.lam)
        rho = states.build_state(family_spec)
        out = channel.evolve_ensemble(rho, bath, t)
        want = op.tensor_power(states.thermal_qubit(0.5).mat, rho.n_qubits)
        assert np.max(np.abs(out.mat - want)) < 1e-8

    def test_population_horizon_for_coherence_free_states(self):
        bath = channel.BathSpec(0.5, 1.0)
        t = 20.0 / abs(bath.lam)
        for spec in (FAMILY_SPECS[1], FAMILY_SPECS[8]):  # ghz, ground
            out = channel.evolve_ensemble(states.build_state(spec), bath, t)
            want = op.tensor_power(states.thermal_qubit(0.5).mat, 2)
            assert np.max(np.abs(out.mat - want)) < 1e-8

    def test_ghz_corner_coherence(self):
        bath = channel.BathSpec(0.5, 1.0)
        t = 0.2
        pr = channel.channel_params(bath, t)
        out = channel.evolve_ensemble(states.ghz(2), bath, t)
        assert abs(out.mat[0, 3]) == pytest.approx(0.5 * (1.0 - pr.p), abs=1e-12)

    def test_lab_frame_matches_kraus_up_to_phase(self):
        bath = channel.BathSpec(0.7, 1.0)
        rho = states.squeezed(0.8, 0.2, 2)
        a = channel.evolve_ensemble(rho, bath, 0.35).mat
        b = channel.evolve_ensemble_lindblad(rho, bath, 0.35).mat
        assert np.max(np.abs(np.abs(a) - np.abs(b))) < 1e-12


class TestDerivative:
    def test_zero_at_t_zero(self, family_spec):
        rho = states.build_state(family_spec)
        d = channel.d_evolve_dbeta(rho, channel.BathSpec(0.5), 0.0)
        assert np.max(np.abs(d)) < 1e-14

    def test_single_qubit_long_time_limit(self):
        # populations relax to pi(beta); d(pi0)/d(beta) = pi0 pi1
        bath = channel.BathSpec(0.5, 1.0)
        t = 200.0 / abs(bath.lam)
        d = channel.d_evolve_dbeta(states.ground_state(1), bath, t)
        pi0 = 1.0 / (1.0 + math.exp(-0.5))
        want = pi0 * (1.0 - pi0) * np.diag([1.0, -1.0])
        assert np.max(np.abs(d - want)) < 1e-10

    @pytest.mark.parametrize("beta", BETAS)
    @pytest.mark.parametrize("t", [0.05, 0.3, 1.0, 4.0])
    def test_matches_finite_difference(self, beta, t):
        bath = channel.BathSpec(beta, 1.0)
        rho = states.build_state(FAMILY_SPECS[6])  # squeezed
        an = channel.d_evolve_dbeta(rho, bath, t)
        fd = channel.d_evolve_dbeta(rho, bath, t, method="finite_difference")
        assert np.allclose(an, fd, rtol=1e-6, atol=1e-9)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_hermitian_traceless(self, n):
        bath = channel.BathSpec(0.5)
        rho = states.thermal_mixture(0.5, 1.0, n)
        d = channel.d_evolve_dbeta(rho, bath, 0.4)
        assert np.max(np.abs(d - d.conj().T)) < 1e-10
        assert abs(d.trace()) < 1e-10

    def test_random_states_match_fd(self):
        bath = channel.BathSpec(0.5)
        for seed in range(4):
            rho = random_density(2, seed)
            an = channel.d_evolve_dbeta(rho, bath, 0.5)
            fd = channel.d_evolve_dbeta(rho, bath, 0.5, method="finite_difference")
            assert np.allclose(an, fd, rtol=1e-6, atol=1e-9)

    def test_fd_step_collision(self):
        with pytest.raises(DomainError):
            channel.d_evolve_dbeta(
                states.ghz(2), channel.BathSpec(1e-7, 1.0), 0.3, method="finite_difference", fd_step=1e-6
            )

    def test_rejects_unknown_method(self):
        with pytest.raises(DomainError):
            channel.d_evolve_dbeta(states.ghz(2), channel.BathSpec(0.5), 0.3, method="autodiff")

    def test_rate_derivative_guard(self):
        with pytest.raises(DomainError):
            channel.dlambda_dbeta(channel.BathSpec(1e-7, 1.0))


class TestKrausDerivative:
    def test_matches_finite_difference(self):
        bath = channel.BathSpec(0.5, 1.0)
        t, h = 0.3, 1e-7
        got = channel.kraus_dbeta(bath, t)
        hi = channel.kraus_ops(channel.channel_params(channel.BathSpec(0.5 + h), t))
        lo = channel.kraus_ops(channel.channel_params(channel.BathSpec(0.5 - h), t))
        for g, a, b in zip(got, hi, lo):
            assert np.allclose(g, (a - b) / (2 * h), rtol=1e-6, atol=1e-8)

    def test_singular_at_t_zero(self):
        with pytest.raises(NumericError):
            channel.kraus_dbeta(channel.BathSpec(0.5), 0.0)

    def test_singular_at_full_mixing(self):
        with pytest.raises(NumericError):
            channel.kraus_dbeta(channel.BathSpec(0.5), 1e9)


class TestMarkovianCorrelationDecay:
    def test_ghz_negativity_non_increasing(self):
        from qthermo.diagnostics import negativity

        bath = channel.BathSpec(0.5, 1.0)
        values = [
            negativity(channel.evolve_ensemble(states.ghz(2), bath, t))
            for t in np.linspace(0.0, 3.0, 25)
        ]
        assert all(b <= a + 1e-10 for a, b in zip(values, values[1:]))


@given(st.floats(0.1, 3.0), st.floats(0.2, 2.0), st.floats(0.0, 3.0))
@settings(max_examples=30, deadline=None)
def test_evolution_preserves_state_contract(beta, gamma, t):
    bath = channel.BathSpec(beta, gamma)
    rho = states.squeezed(1.1, 0.5, 2)
    out = channel.evolve_ensemble(rho, bath, t)  # DensityMatrix validates itself
    assert abs(out.mat.trace().real - 1.0) < 1e-12
