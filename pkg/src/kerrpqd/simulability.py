"""Noise thresholds for classical simulability of lossy boson sampling.

A sampling experiment is efficiently simulable once three phase-space
objects are simultaneously non-negative: the input PQD at some ordering t,
the detector PQDs at ordering -s with s >= s_bar = 1 - 2 p_D / eta_D, and
the transition kernel connecting them, which is Gaussian precisely when

    I - L^dag L - diag(s) + L^dag diag(t) L >= 0

for the network transfer matrix L.  For uniform loss L = sqrt(eta_L) U this
collapses to the scalar margin 2 p_D/eta_D - eta_L + eta_L t_bar, and a
thermal environment with mean occupation nbar relaxes it further.  This
module evaluates every such inequality as a signed margin, and implements
the single-mode Monte-Carlo estimator that realizes the simulation
certificate constructively: sample the input PQD, push through the Gaussian
kernel, and average the detector PQD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OrderingTooLow, PreconditionViolated
from .negativity import EPS_NEG_DEFAULT, negativity_volume
from .phase_space import GaussianState, gaussian_pqd, superposition_pqd
from .states import SuperpositionState

__all__ = [
    "NoiseParams",
    "TransferMatrix",
    "Verdict",
    "DetectorPqd",
    "detector_order_threshold",
    "detector_pqd_off",
    "detector_pqd_on",
    "transition_condition",
    "uniform_threshold_verdict",
    "gbs_qi_verdict",
    "thermal_lambda",
    "thermal_transition_condition",
    "thermal_threshold_verdict",
    "estimate_click_probability",
]

# Margins this close to zero are treated as exactly zero, so that two
# algebraically identical inequalities cannot disagree in sign at rounding.
MARGIN_TOL = 1e-10


@dataclass(frozen=True)
class NoiseParams:
    """Uniform network loss plus on/off detector noise and environment heat."""

    eta_L: float = 1.0
    eta_D: float = 1.0
    p_D: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.eta_L <= 1.0:
            raise ValueError("network transmissivity eta_L must lie in [0, 1]")
        if not 0.0 < self.eta_D <= 1.0:
            raise ValueError("detector efficiency eta_D must lie in (0, 1]")
        if not 0.0 <= self.p_D <= 1.0:
            raise ValueError("dark-count probability p_D must lie in [0, 1]")
        if not self.nbar >= 0.0:
            raise ValueError("environment occupation nbar must be >= 0")

    @property
    def k(self) -> float:
        """Thermal variance parameter 2 nbar + 1."""
        return 2.0 * self.nbar + 1.0

    @property
    def q_D(self) -> float:
        """Effective dark-count rate p_D / eta_D."""
        return self.p_D / self.eta_D


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """M x M network matrix with L^dag L <= I (sub-unitary)."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("transfer matrix must be square")
        top = float(np.linalg.svd(mat, compute_uv=False)[0])
        if top > 1.0 + 1e-12:
            raise ValueError(f"largest singular value {top!r} exceeds 1")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def num_modes(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def uniform_loss(cls, eta_L: float, num_modes: int = 1, unitary=None) -> "TransferMatrix":
        if unitary is None:
            unitary = np.eye(num_modes)
        return cls(math.sqrt(eta_L) * np.asarray(unitary, dtype=complex))


@dataclass(frozen=True)
class Verdict:
    """Signed slack of one inequality; simulable iff the margin is >= 0."""

    inequality: str
    margin: float
    simulable: bool
    always_simulable: bool | None = None


def _verdict(inequality: str, margin: float, always_simulable=None) -> Verdict:
    if abs(margin) <= MARGIN_TOL:
        margin = 0.0
    return Verdict(inequality, margin, margin >= 0.0, always_simulable)


# ---------------------------------------------------------------------------
# detector PQDs
# ---------------------------------------------------------------------------


def detector_order_threshold(noise: NoiseParams) -> float:
    """s_bar = 1 - 2 p_D / eta_D; the no-click PQD is non-negative for s >= s_bar."""
    return 1.0 - 2.0 * noise.p_D / noise.eta_D


@dataclass(frozen=True)
class DetectorPqd:
    """Radial form constant + amplitude * exp(-decay |beta|^2)."""

    constant: float
    amplitude: float
    decay: float

    def __call__(self, beta) -> np.ndarray:
        b = np.asarray(beta, dtype=complex)
        out = self.constant + self.amplitude * np.exp(-self.decay * np.abs(b) ** 2)
        return out if out.shape else float(out)

    def min_value(self) -> float:
        """Infimum over the plane (attained at 0 or in the |beta| -> inf limit)."""
        return min(self.constant, self.constant + self.amplitude)


def _detector_denominator(noise: NoiseParams, s: float) -> float:
    denom = 1.0 - noise.eta_D * (1.0 - s) / 2.0
    if denom <= 0.0:
        raise OrderingTooLow(
            f"detector PQD undefined at s={s!r}; needs s > 1 - 2/eta_D = "
            f"{1.0 - 2.0 / noise.eta_D!r}"
        )
    return denom


def detector_pqd_off(noise: NoiseParams, s: float) -> DetectorPqd:
    """(-s)-ordered PQD of the no-click POVM element."""
    denom = _detector_denominator(noise, s)
    return DetectorPqd(0.0, (1.0 - noise.p_D) / (math.pi * denom), noise.eta_D / denom)


def detector_pqd_on(noise: NoiseParams, s: float) -> DetectorPqd:
    """Complement 1/pi - off; non-negative everywhere iff s >= s_bar."""
    off = detector_pqd_off(noise, s)
    return DetectorPqd(1.0 / math.pi, -off.amplitude, off.decay)


# ---------------------------------------------------------------------------
# transition-kernel positivity
# ---------------------------------------------------------------------------


def _as_diag(values, num_modes: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 1:
        arr = np.repeat(arr, num_modes)
    if arr.size != num_modes:
        raise ValueError("ordering vector length must match the mode count")
    return np.diag(arr)


def transition_condition(transfer, s_vec, t_vec) -> Verdict:
    """Smallest eigenvalue of I - L^dag L - diag(s) + L^dag diag(t) L."""
    mat = transfer.matrix if isinstance(transfer, TransferMatrix) else np.asarray(transfer)
    m = mat.shape[0]
    s_mat = _as_diag(s_vec, m)
    t_mat = _as_diag(t_vec, m)
    herm = np.eye(m) - mat.conj().T @ mat - s_mat + mat.conj().T @ t_mat @ mat
    herm = 0.5 * (herm + herm.conj().T)
    margin = float(np.linalg.eigvalsh(herm)[0])
    return _verdict("transition", margin)


def uniform_threshold_verdict(noise: NoiseParams, tbar: float) -> Verdict:
    """Uniform-loss sufficient condition 2 p_D/eta_D - eta_L + eta_L t_bar >= 0."""
    margin = 2.0 * noise.p_D / noise.eta_D - noise.eta_L + noise.eta_L * tbar
    return _verdict("uniform_threshold", margin)


def gbs_qi_verdict(noise: NoiseParams, r: float, num_modes: int, eps: float) -> Verdict:
    """Squeezed-input (GBS) bound sech(ramp/2) > exp(-eps^2 / 4M).

    The ramp argument is ln[(1 - 2 q_D)/(eta_L e^{-2r} + 1 - eta_L)] clamped
    below at zero; once q_D >= 1/2 the log diverges negative and the left
    side is sech(0) = 1, i.e. dark counts alone wash the statistics out.
    """
    if eps <= 0:
        raise ValueError("total-variation budget eps must be positive")
    if num_modes < 1:
        raise ValueError("mode count must be >= 1")
    q_d = noise.q_D
    if q_d >= 0.5:
        lhs = 1.0
    else:
        denom = noise.eta_L * math.exp(-2.0 * r) + 1.0 - noise.eta_L
        ramp = max(math.log((1.0 - 2.0 * q_d) / denom), 0.0)
        lhs = 1.0 / math.cosh(0.5 * ramp)
    rhs = math.exp(-eps * eps / (4.0 * num_modes))
    return _verdict("gbs_qi", lhs - rhs)


# ---------------------------------------------------------------------------
# thermal environment corrections
# ---------------------------------------------------------------------------


def thermal_lambda(noise: NoiseParams) -> float:
    """lambda = eta_L + (2 nbar + 1)(1 - eta_L) >= 1; the lost-mode variance."""
    return noise.eta_L + noise.k * (1.0 - noise.eta_L)


def thermal_transition_condition(noise: NoiseParams, s: float, t: float) -> Verdict:
    """Single-mode kernel positivity with heat: t eta_L - s + lambda - eta_L >= 0."""
    margin = t * noise.eta_L - s + thermal_lambda(noise) - noise.eta_L
    return _verdict("thermal_transition", margin)


def thermal_threshold_verdict(noise: NoiseParams) -> Verdict:
    """Kerr-class inputs (t_bar = -1): p_D/eta_D >= eta_L - nbar (1 - eta_L).

    Heating helps the classical side; once nbar >= eta_L/(1 - eta_L) the
    experiment is simulable even with ideal detectors, which is reported on
    the always_simulable flag.
    """
    margin = noise.p_D / noise.eta_D - noise.eta_L + noise.nbar * (1.0 - noise.eta_L)
    always = noise.eta_L < 1.0 and noise.nbar >= noise.eta_L / (1.0 - noise.eta_L)
    return _verdict("thermal_threshold", margin, always)


# ---------------------------------------------------------------------------
# Monte-Carlo click-probability estimator (single mode)
# ---------------------------------------------------------------------------


def _gaussian_sampler(state: GaussianState, t: float):
    pqd = gaussian_pqd(state, t)  # validates the ordering
    del pqd
    sigma = state.cov - t * np.eye(2)
    chol = np.linalg.cholesky(0.25 * sigma)
    mean = state.mean

    def draw(rng: np.random.Generator, size: int) -> np.ndarray:
        return mean + rng.standard_normal((size, 2)) @ chol.T

    return draw


def _rejection_sampler(state: SuperpositionState, t: float):
    """Sample the (non-negative) PQD under its term-envelope mixture.

    env(y) = sum_i |f_i(y)| >= |W(y)| pointwise, so acceptance with
    probability max(W, 0)/env is exact; the envelope is a Gaussian mixture
    with weights given by the term masses.
    """
    pqd = superposition_pqd(state, t)
    peaks, centers, chols, masses = [], [], [], []
    for term in pqd.terms:
        peak, center, prec = term.envelope()
        cov = np.linalg.inv(prec)
        cov = 0.5 * (cov + cov.T)
        masses.append(peak * 2.0 * math.pi / math.sqrt(float(np.linalg.det(prec))))
        peaks.append(peak)
        centers.append(center)
        chols.append(np.linalg.cholesky(cov))
    weights = np.asarray(masses) / math.fsum(masses)
    precs = [term.envelope()[2] for term in pqd.terms]

    def envelope(y: np.ndarray) -> np.ndarray:
        out = np.zeros(y.shape[0])
        for peak, center, prec in zip(peaks, centers, precs):
            d = y - center
            out += peak * np.exp(-0.5 * np.einsum("ni,ij,nj->n", d, prec, d))
        return out

    def draw(rng: np.random.Generator, size: int) -> np.ndarray:
        got = []
        have = 0
        while have < size:
            batch = max(size, 4096)
            counts = rng.multinomial(batch, weights)
            ys = np.empty((batch, 2))
            off = 0
            for idx, cnt in enumerate(counts):
                z = rng.standard_normal((cnt, 2))
                ys[off : off + cnt] = centers[idx] + z @ chols[idx].T
                off += cnt
            w_vals = np.maximum(np.asarray(pqd(ys[:, 0] + 1j * ys[:, 1])), 0.0)
            keep = rng.random(batch) * envelope(ys) <= w_vals
            got.append(ys[keep])
            have += int(keep.sum())
        return np.concatenate(got)[:size]

    return draw


def estimate_click_probability(
    state,
    noise: NoiseParams,
    t: float,
    s: float | None = None,
    n_samples: int = 100_000,
    seed: int = 0,
    *,
    eps_neg: float = EPS_NEG_DEFAULT,
):
    """(p_hat, stderr) for the no-click probability of the noisy single mode.

    Draws beta from the input t-PQD, applies the loss contraction
    sqrt(eta_L) plus the Gaussian kernel noise of variance c/4 per axis
    with c = t eta_L - s + lambda - eta_L, and averages pi times the
    no-click detector PQD at ordering -s.  `s` defaults to the detector
    threshold s_bar.

    Raises PreconditionViolated when any of the three positivity
    certificates fails: s below s_bar, non-positive kernel margin, or input
    negativity above eps_neg.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples for a standard error")
    s_bar = detector_order_threshold(noise)
    s = s_bar if s is None else float(s)
    if s < s_bar - 1e-12:
        raise PreconditionViolated(
            f"detector PQD is negative at s={s!r} (threshold s_bar={s_bar!r})"
        )
    c = t * noise.eta_L - s + thermal_lambda(noise) - noise.eta_L
    if c < 1e-9:
        raise PreconditionViolated(
            f"transition kernel margin {c:.3e} below 1e-09; not samplable"
        )

    if isinstance(state, GaussianState):
        if state.num_modes != 1:
            raise ValueError("the estimator is single-mode")
        draw = _gaussian_sampler(state, t)
    else:
        if len(state.branches) == 1:
            b = state.branches[0]
            draw = _gaussian_sampler(GaussianState.squeezed_coherent(b.alpha, b.squeeze), t)
        else:
            value, err = negativity_volume(state, t)
            if value > eps_neg:
                raise PreconditionViolated(
                    f"input PQD negativity {value:.3e} exceeds eps_neg={eps_neg!r} at t={t!r}"
                )
            draw = _rejection_sampler(state, t)

    off = detector_pqd_off(noise, s)
    amp = math.pi * off.amplitude
    decay = off.decay

    rng = np.random.default_rng(seed)
    ys = draw(rng, n_samples)
    betas = math.sqrt(noise.eta_L) * ys + math.sqrt(0.25 * c) * rng.standard_normal(
        (n_samples, 2)
    )
    vals = amp * np.exp(-decay * np.einsum("ni,ni->n", betas, betas))
    p_hat = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(n_samples))
    return p_hat, stderr
