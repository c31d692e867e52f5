import math

import numpy as np
import pytest

from kerrpqd.errors import OrderingTooLow, PreconditionViolated
from kerrpqd.fock_oracle import (
    build_state,
    oracle_loss,
    oracle_off_probability,
)
from kerrpqd.phase_space import GaussianState
from kerrpqd.simulability import (
    NoiseParams,
    TransferMatrix,
    detector_order_threshold,
    detector_pqd_off,
    detector_pqd_on,
    estimate_click_probability,
    gbs_qi_verdict,
    thermal_lambda,
    thermal_threshold_verdict,
    thermal_transition_condition,
    transition_condition,
    uniform_threshold_verdict,
)
from kerrpqd.states import SqueezeParam, SuperpositionState, Branch, squeeze_then_kerr_state


# ---------------------------------------------------------------------------
# parameter containers
# ---------------------------------------------------------------------------


def test_noise_params_validation():
    for bad in (
        dict(eta_L=-0.1),
        dict(eta_L=1.1),
        dict(eta_D=0.0),
        dict(eta_D=1.2),
        dict(p_D=-0.2),
        dict(p_D=1.01),
        dict(nbar=-1.0),
    ):
        with pytest.raises(ValueError):
            NoiseParams(**bad)
    noise = NoiseParams(eta_L=0.5, eta_D=0.8, p_D=0.2, nbar=0.75)
    assert noise.k == 2.5
    assert noise.q_D == pytest.approx(0.25)


def test_transfer_matrix_validation():
    with pytest.raises(ValueError):
        TransferMatrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        TransferMatrix(1.2 * np.eye(2))
    tm = TransferMatrix.uniform_loss(0.36, 2)
    assert tm.num_modes == 2
    assert np.allclose(tm.matrix, 0.6 * np.eye(2))


# ---------------------------------------------------------------------------
# detector PQDs
# ---------------------------------------------------------------------------


def test_detector_order_threshold_values():
    assert detector_order_threshold(NoiseParams(eta_D=1.0, p_D=0.0)) == 1.0
    assert detector_order_threshold(NoiseParams(eta_D=1.0, p_D=0.5)) == 0.0
    assert detector_order_threshold(NoiseParams(eta_D=0.8, p_D=0.1)) == 0.75


def test_ideal_detector_off_pqd_at_origin():
    off = detector_pqd_off(NoiseParams(eta_D=1.0, p_D=0.0), 0.0)
    assert off(0.0) == pytest.approx(2.0 / math.pi)


def test_povm_completeness_pointwise():
    noise = NoiseParams(eta_D=0.7, p_D=0.2)
    off = detector_pqd_off(noise, -0.3)
    on = detector_pqd_on(noise, -0.3)
    for beta in (0.0, 0.5, 1.3 - 0.8j, 3.0j):
        assert off(beta) + on(beta) == pytest.approx(1.0 / math.pi, abs=1e-15)


def test_on_pqd_minimum_vanishes_at_threshold():
    noise = NoiseParams(eta_D=0.8, p_D=0.1)
    sbar = detector_order_threshold(noise)
    assert abs(detector_pqd_on(noise, sbar).min_value()) < 1e-10
    # just below the threshold the on-PQD dips negative at the origin
    assert detector_pqd_on(noise, sbar - 0.05).min_value() < 0.0


def test_saturated_dark_counts_kill_off_pqd():
    off = detector_pqd_off(NoiseParams(eta_D=0.9, p_D=1.0), 0.0)
    assert off(0.0) == 0.0 and off(2.0) == 0.0


def test_detector_pqd_ordering_floor():
    noise = NoiseParams(eta_D=1.0)
    with pytest.raises(OrderingTooLow):
        detector_pqd_off(noise, -1.0)
    with pytest.raises(OrderingTooLow):
        detector_pqd_on(noise, -1.3)
    assert detector_pqd_off(noise, -0.99)(0.0) > 0.0


# ---------------------------------------------------------------------------
# transition-kernel positivity
# ---------------------------------------------------------------------------


def test_transition_all_loss_margin():
    s = [0.3, -0.5, 0.9]
    verdict = transition_condition(np.zeros((3, 3)), s, [0.0, 0.0, 0.0])
    assert verdict.margin == pytest.approx(1.0 - 0.9)
    assert verdict.simulable


def test_transition_reduces_to_uniform_formula():
    rng = np.random.default_rng(7)
    for _ in range(5):
        # random unitary via QR
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        eta_l, sbar, tbar = rng.uniform(0.1, 1.0), rng.uniform(-1, 1), rng.uniform(-1, 1)
        tm = TransferMatrix.uniform_loss(eta_l, 3, unitary=q)
        verdict = transition_condition(tm, [sbar] * 3, [tbar] * 3)
        ref = tbar * eta_l - sbar + 1.0 - eta_l
        assert verdict.margin == pytest.approx(ref, abs=1e-10)


def test_transition_margin_is_a_psd_certificate():
    # margin m means H - m I is PSD and H - (m + d) I is not
    rng = np.random.default_rng(3)
    mat = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    mat /= 1.1 * np.linalg.svd(mat, compute_uv=False)[0]
    s_vec, t_vec = rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4)
    margin = transition_condition(mat, s_vec, t_vec).margin
    herm = (
        np.eye(4)
        - mat.conj().T @ mat
        - np.diag(s_vec)
        + mat.conj().T @ np.diag(t_vec) @ mat
    )
    herm = 0.5 * (herm + herm.conj().T)
    np.linalg.cholesky(herm - (margin - 1e-9) * np.eye(4))
    with pytest.raises(np.linalg.LinAlgError):
        np.linalg.cholesky(herm - (margin + 1e-6) * np.eye(4))


def test_transition_vector_length_mismatch():
    with pytest.raises(ValueError):
        transition_condition(np.zeros((2, 2)), [0.0, 0.0, 0.0], [0.0, 0.0])


# ---------------------------------------------------------------------------
# uniform-loss threshold inequality
# ---------------------------------------------------------------------------


def test_uniform_threshold_spec_point():
    verdict = uniform_threshold_verdict(NoiseParams(0.9, 0.8, 0.05), -1.0)
    assert verdict.margin == pytest.approx(-1.675)
    assert not verdict.simulable


def test_uniform_threshold_boundaries():
    for tbar in (-1.0, -0.3, 0.5):
        eta_l, eta_d = 0.8, 0.9
        p_crit = eta_d * eta_l * (1.0 - tbar) / 2.0
        at = uniform_threshold_verdict(NoiseParams(eta_l, eta_d, p_crit), tbar)
        assert at.margin == 0.0 and at.simulable
        below = uniform_threshold_verdict(NoiseParams(eta_l, eta_d, p_crit - 1e-3), tbar)
        assert below.margin < 0.0 and not below.simulable


def test_coherent_class_always_simulable():
    # t_bar = 1 (coherent inputs): margin = 2 p_D / eta_D >= 0 for any noise
    for noise in (NoiseParams(), NoiseParams(1.0, 0.5, 0.0), NoiseParams(0.3, 0.9, 0.2)):
        assert uniform_threshold_verdict(noise, 1.0).simulable


# ---------------------------------------------------------------------------
# squeezed-input (GBS) bound
# ---------------------------------------------------------------------------


def test_gbs_frozen_point_recomputed_inline():
    noise = NoiseParams(eta_L=0.9, eta_D=0.8, p_D=0.008)  # q_D = 0.01
    verdict = gbs_qi_verdict(noise, r=1.0, num_modes=100, eps=0.1)
    denom = 0.9 * math.exp(-2.0) + 0.1
    lhs = 1.0 / math.cosh(0.5 * math.log(0.98 / denom))
    rhs = math.exp(-0.01 / 400.0)
    assert verdict.margin == pytest.approx(lhs - rhs, abs=1e-12)
    assert not verdict.simulable
    assert verdict.margin == pytest.approx(-0.2241, abs=5e-4)


def test_gbs_dark_count_washout():
    noise = NoiseParams(eta_L=1.0, eta_D=0.6, p_D=0.3)  # q_D = 0.5
    verdict = gbs_qi_verdict(noise, r=2.0, num_modes=10, eps=0.2)
    assert verdict.simulable and verdict.margin > 0.0


def test_gbs_ramp_clamped_at_zero():
    # all light lost: the ratio is below 1, the ramp clamps, lhs = 1
    verdict = gbs_qi_verdict(NoiseParams(eta_L=0.0), r=1.5, num_modes=4, eps=0.3)
    assert verdict.simulable


def test_gbs_margin_monotone_in_squeezing():
    noise = NoiseParams(eta_L=0.95, eta_D=1.0, p_D=0.001)
    margins = [gbs_qi_verdict(noise, r, 50, 0.1).margin for r in (0.2, 0.6, 1.0, 1.5)]
    assert all(a >= b for a, b in zip(margins, margins[1:]))


def test_gbs_validation():
    with pytest.raises(ValueError):
        gbs_qi_verdict(NoiseParams(), 1.0, 10, 0.0)
    with pytest.raises(ValueError):
        gbs_qi_verdict(NoiseParams(), 1.0, 0, 0.1)


# ---------------------------------------------------------------------------
# thermal environment
# ---------------------------------------------------------------------------


def test_thermal_lambda_values():
    assert thermal_lambda(NoiseParams(eta_L=0.4, nbar=0.0)) == 1.0
    assert thermal_lambda(NoiseParams(eta_L=1.0, nbar=3.0)) == 1.0
    assert thermal_lambda(NoiseParams(eta_L=0.5, nbar=0.5)) == pytest.approx(1.5)


def test_thermal_transition_frozen_point():
    # lambda = 0.7 + 1.4 * 0.3 = 1.12, margin = -0.7 + 0.4 + 1.12 - 0.7
    verdict = thermal_transition_condition(
        NoiseParams(eta_L=0.7, nbar=0.2), s=-0.4, t=-1.0
    )
    assert verdict.margin == pytest.approx(0.12, abs=1e-12)
    assert verdict.simulable


def test_thermal_transition_no_loss_reduction():
    # eta_L = 0: margin = lambda - s >= 1 - s
    verdict = thermal_transition_condition(NoiseParams(eta_L=0.0, nbar=0.3), 0.5, -1.0)
    assert verdict.margin == pytest.approx(thermal_lambda(NoiseParams(eta_L=0.0, nbar=0.3)) - 0.5)


def test_thermal_transition_cold_limit_matches_uniform():
    for eta_l in (0.2, 0.6, 1.0):
        for p_d in (0.0, 0.1, 0.3):
            noise = NoiseParams(eta_L=eta_l, eta_D=0.8, p_D=p_d, nbar=0.0)
            sbar = detector_order_threshold(noise)
            for tbar in (-1.0, -0.25, 0.4):
                cold = thermal_transition_condition(noise, sbar, tbar).margin
                uniform = uniform_threshold_verdict(noise, tbar).margin
                assert cold == pytest.approx(uniform, abs=1e-12)


def test_thermal_threshold_frozen_point():
    verdict = thermal_threshold_verdict(NoiseParams(eta_L=0.5, eta_D=1.0, p_D=0.3, nbar=0.5))
    assert verdict.margin == pytest.approx(0.05, abs=1e-12)
    assert verdict.simulable
    assert verdict.always_simulable is False


def test_thermal_threshold_always_flag_boundary():
    # heating alone suffices once nbar >= eta_L / (1 - eta_L)
    assert thermal_threshold_verdict(NoiseParams(eta_L=0.5, nbar=1.0)).always_simulable
    assert not thermal_threshold_verdict(NoiseParams(eta_L=0.5, nbar=0.999)).always_simulable
    assert thermal_threshold_verdict(NoiseParams(eta_L=1.0, nbar=50.0)).always_simulable is False


def test_thermal_threshold_cold_sign_matches_uniform():
    for eta_l in np.linspace(0.05, 1.0, 8):
        for q_d in np.linspace(0.0, 0.5, 8):
            noise = NoiseParams(eta_L=eta_l, eta_D=0.5, p_D=0.5 * q_d, nbar=0.0)
            cold = thermal_threshold_verdict(noise)
            uniform = uniform_threshold_verdict(noise, -1.0)
            assert cold.simulable == uniform.simulable
            assert cold.margin == pytest.approx(uniform.margin / 2.0, abs=1e-12)


def test_margins_monotone_in_noise():
    etas = np.linspace(0.1, 1.0, 5)
    pds = np.linspace(0.0, 0.4, 5)
    nbars = np.linspace(0.0, 1.5, 4)
    for eta_d in (0.5, 1.0):
        for nbar in nbars:
            for eta_l in etas:
                margins = [
                    thermal_threshold_verdict(NoiseParams(eta_l, eta_d, p, nbar)).margin
                    for p in pds
                ]
                assert all(a <= b for a, b in zip(margins, margins[1:]))
            for p_d in pds:
                margins = [
                    thermal_threshold_verdict(NoiseParams(e, eta_d, p_d, nbar)).margin
                    for e in etas
                ]
                assert all(a >= b for a, b in zip(margins, margins[1:]))


# ---------------------------------------------------------------------------
# Monte-Carlo click estimator
# ---------------------------------------------------------------------------

MC_NOISE = NoiseParams(eta_L=0.5, eta_D=0.8, p_D=0.45)  # samplable at t = -1


def test_mc_vacuum_matches_dark_count_complement():
    p, se = estimate_click_probability(
        GaussianState.vacuum(1), MC_NOISE, t=-1.0, n_samples=100_000, seed=11
    )
    assert abs(p - 0.55) < 3.0 * se
    assert se < 2e-3


def test_mc_coherent_matches_closed_form():
    alpha = 0.9 + 0.4j
    ref = 0.55 * math.exp(-0.8 * 0.5 * abs(alpha) ** 2)
    p, se = estimate_click_probability(
        GaussianState.coherent(alpha), MC_NOISE, t=-1.0, n_samples=100_000, seed=12
    )
    assert abs(p - ref) < 3.0 * se


def test_mc_squeezed_vacuum_matches_fock_oracle():
    state = SuperpositionState((Branch(1.0, 0.0, SqueezeParam(0.3)),))
    p, se = estimate_click_probability(state, MC_NOISE, t=-1.0, n_samples=100_000, seed=21)
    rho = oracle_loss(build_state(state, n_max=60), MC_NOISE.eta_L)
    ref = oracle_off_probability(rho, MC_NOISE)
    assert abs(p - ref) < 3.0 * se


def test_mc_seed_reproducibility():
    coh = GaussianState.coherent(0.5)
    first = estimate_click_probability(coh, MC_NOISE, t=-1.0, n_samples=20_000, seed=5)
    again = estimate_click_probability(coh, MC_NOISE, t=-1.0, n_samples=20_000, seed=5)
    other = estimate_click_probability(coh, MC_NOISE, t=-1.0, n_samples=20_000, seed=6)
    assert first == again
    assert first != other


def test_mc_rejects_detector_ordering_below_threshold():
    sbar = detector_order_threshold(MC_NOISE)
    with pytest.raises(PreconditionViolated):
        estimate_click_probability(
            GaussianState.vacuum(1), MC_NOISE, t=-1.0, s=sbar - 0.1, n_samples=1000
        )


def test_mc_rejects_unsamplable_kernel():
    # 2 p_D / eta_D - eta_L (1 - t) < 0 at these settings
    noise = NoiseParams(eta_L=0.9, eta_D=0.7, p_D=0.05)
    with pytest.raises(PreconditionViolated):
        estimate_click_probability(GaussianState.vacuum(1), noise, t=-1.0, n_samples=1000)


def test_mc_rejects_negative_pqd_state():
    state = squeeze_then_kerr_state(3, 1.0, SqueezeParam(0.2))
    with pytest.raises(PreconditionViolated):
        estimate_click_probability(state, MC_NOISE, t=0.0, n_samples=1000)


def test_mc_validation():
    with pytest.raises(ValueError):
        estimate_click_probability(GaussianState.vacuum(1), MC_NOISE, t=-1.0, n_samples=1)
    with pytest.raises(ValueError):
        estimate_click_probability(GaussianState.vacuum(2), MC_NOISE, t=-1.0, n_samples=100)
