"""Concrete single-mode families: squeezed reservoir, non-Markovian maps, EP-free catalog.

The squeezed-reservoir Lindbladian has drift A = [[-k/2, D-e], [-(D+e), -k/2]]
with an exceptional point exactly on D^2 = e^2 (e != 0) and a phase-sensitive
diffusion; its Lyapunov gauge covariance has closed forms, both off the EP
manifold and on each EP branch. The non-Markovian family X_t = kappa(t) e^{tB}
with memory factor kappa(t) = exp(-gamma t + r sin(nu t)) is defective on the
lines lambda = +-omega, where the Stein covariance follows from the Jordan
closed form for three diffusion structures. The catalog collects standard
channels that cannot have EPs (drift proportional to the identity) plus the
critically damped oscillator that always does.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateModelError, DimensionError, PhysicalityError, StabilityError
from .generators import GaussianGenerator, LindbladData, semigroup_channel
from .matrix_equations import (
    GaugeCovariance,
    GaugeSource,
    JordanDrift2x2,
    expm2,
    lyapunov_residual,
    stein_jordan_closed_form,
)
from .phase_space import CpMethod, GaussianChannel, cp_check


class EpBranch(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


# ---------------------------------------------------------------------------
# Squeezed-reservoir Lindbladian
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SqueezedReservoirParams:
    """Damping kappa, detuning delta, parametric drive epsilon, squeezing (r, phi)."""

    kappa: float
    delta: float
    epsilon: float
    r: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise DimensionError("kappa must be positive")
        if self.r < 0:
            raise DimensionError("squeezing magnitude r must be nonnegative")


def squeezed_hamiltonian_matrix(params):
    """Degenerate parametric amplifier: H_S = diag(delta + eps, delta - eps)."""
    return np.diag([params.delta + params.epsilon, params.delta - params.epsilon])


def squeezed_jump_row(params):
    """Coefficients of the Bogoliubov jump L = cosh(r) a + e^{i phi} sinh(r) a^dag."""
    ch, sh = math.cosh(params.r), math.sinh(params.r)
    phase = complex(math.cos(params.phi), math.sin(params.phi))
    return np.array([ch + phase * sh, 1j * (ch - phase * sh)]) / math.sqrt(2.0)


def squeezed_lindblad_data(params):
    return LindbladData(
        H=squeezed_hamiltonian_matrix(params),
        jump_rows=(squeezed_jump_row(params),),
        rate=params.kappa,
    )


def squeezed_generator(params):
    """Closed-form drift and diffusion of the squeezed-reservoir model.

    A = [[-k/2, delta-eps], [-(delta+eps), -k/2]],
    D = (k/2) [[c2r - s2r cos phi, -s2r sin phi], [-s2r sin phi, c2r + s2r cos phi]].
    Identical to `from_lindblad(squeezed_lindblad_data(params))`.
    """
    k, dlt, eps = params.kappa, params.delta, params.epsilon
    c2, s2 = math.cosh(2 * params.r), math.sinh(2 * params.r)
    cp, sp = math.cos(params.phi), math.sin(params.phi)
    a = np.array([[-0.5 * k, dlt - eps], [-(dlt + eps), -0.5 * k]])
    d = 0.5 * k * np.array([[c2 - s2 * cp, -s2 * sp], [-s2 * sp, c2 + s2 * cp]])
    return GaussianGenerator(A=a, D=d, u=np.zeros(2))


def squeezed_drift_eigenvalues(params):
    """lambda_pm = -kappa/2 +- sqrt(eps^2 - delta^2) (complex for delta^2 > eps^2)."""
    disc = complex(params.epsilon**2 - params.delta**2)
    root = np.sqrt(disc)
    return np.array([-0.5 * params.kappa - root, -0.5 * params.kappa + root])


def _squeezed_is_hurwitz(params):
    gap = params.epsilon**2 - params.delta**2
    return gap <= 0 or params.kappa > 2.0 * math.sqrt(gap)


def squeezed_general_gauge(params):
    """Off-manifold closed form of the Lyapunov gauge covariance.

    s_qp = (k D_qp + (delta-eps) D_pp - (delta+eps) D_qq) / (k^2 + 4(delta^2-eps^2)),
    then s_qq = D_qq/k + 2(delta-eps) s_qp / k and
    s_pp = D_pp/k - 2(delta+eps) s_qp / k.
    """
    if not _squeezed_is_hurwitz(params):
        raise StabilityError("drift not Hurwitz: kappa <= 2 sqrt(eps^2 - delta^2)")
    k, dlt, eps = params.kappa, params.delta, params.epsilon
    gen = squeezed_generator(params)
    dqq, dqp, dpp = gen.D[0, 0], gen.D[0, 1], gen.D[1, 1]
    s_qp = (k * dqp + (dlt - eps) * dpp - (dlt + eps) * dqq) / (
        k * k + 4.0 * (dlt * dlt - eps * eps)
    )
    s_qq = dqq / k + 2.0 * (dlt - eps) * s_qp / k
    s_pp = dpp / k - 2.0 * (dlt + eps) * s_qp / k
    s = np.array([[s_qq, s_qp], [s_qp, s_pp]])
    return GaugeCovariance(
        S=s, source=GaugeSource.LYAPUNOV, residual=lyapunov_residual(gen.A, s, gen.D)
    )


def squeezed_ep_gauge(params, branch):
    """Closed-form gauge covariance directly on an EP branch delta = +-eps.

    The detuning is pinned to the branch internally (params.delta is ignored).
    Each branch substitutes delta = +-eps into the general off-manifold
    solution; a bare eps -> -eps sign flip in the Plus-branch expressions does
    not solve the Minus-branch Lyapunov equation.
    """
    branch = EpBranch(branch)
    k, eps = params.kappa, params.epsilon
    c2, s2 = math.cosh(2 * params.r), math.sinh(2 * params.r)
    big = c2 - s2 * math.cos(params.phi)  # cosh(2r) - sinh(2r) cos(phi)
    small = c2 + s2 * math.cos(params.phi)
    ss = s2 * math.sin(params.phi)
    if branch is EpBranch.PLUS:
        s_qq = 0.5 * big
        s_qp = -0.5 * ss - (eps / k) * big
        s_pp = 0.5 * small + (2.0 * eps / k) * ss + (4.0 * eps * eps / (k * k)) * big
        on_branch = SqueezedReservoirParams(k, params.epsilon, eps, params.r, params.phi)
    else:
        s_pp = 0.5 * small
        s_qp = -0.5 * ss - (eps / k) * small
        s_qq = 0.5 * big + (2.0 * eps / k) * ss + (4.0 * eps * eps / (k * k)) * small
        on_branch = SqueezedReservoirParams(k, -params.epsilon, eps, params.r, params.phi)
    s = np.array([[s_qq, s_qp], [s_qp, s_pp]])
    gen = squeezed_generator(on_branch)
    return GaugeCovariance(
        S=s, source=GaugeSource.EP_BRANCH_FORMULA, residual=lyapunov_residual(gen.A, s, gen.D)
    )


# ---------------------------------------------------------------------------
# Non-Markovian family X_t = kappa(t) exp(t B(lambda, omega))
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IsotropicDiffusion:
    """Y_t = y(t) I with y(t) = |1 - kappa(t)^2|/2 + eps_buffer."""

    kind: str = field(default="iso", init=False)


@dataclass(frozen=True)
class AnisotropicDiffusion:
    """Y_t = diag(g e^s, g e^-s) with det Y_t = g^2 at the near-minimal target."""

    s: float = 0.5
    kind: str = field(default="aniso", init=False)


@dataclass(frozen=True)
class DriftAlignedDiffusion:
    """Y_t = nu (I + alpha B B^T / tr(B B^T)), nu fixed by the determinant target."""

    alpha: float = 1.0
    kind: str = field(default="drift-aligned", init=False)

    def __post_init__(self):
        if self.alpha <= 0:
            raise DimensionError("drift-aligned weight alpha must be positive")


@dataclass(frozen=True)
class NmFamilyParams:
    """Drift plane coordinates (lam, omega) plus memory and diffusion settings."""

    lam: float
    omega: float
    gamma: float = 1.0
    r_mem: float = 0.3
    nu: float = 1.0
    diffusion: object = field(default_factory=IsotropicDiffusion)
    eps_buffer: float = 1e-3

    def __post_init__(self):
        if self.eps_buffer <= 0:
            raise DimensionError("CP buffer eps_buffer must be positive")
        if not 0 < self.r_mem < self.gamma / self.nu:
            raise DimensionError("memory amplitude must satisfy 0 < r_mem < gamma/nu")


def drift_tensor(lam, omega):
    """Traceless two-parameter drift generator B(lam, omega)."""
    return np.array([[lam, omega], [-omega, -lam]])


def memory_factor(params, t):
    """Non-exponential memory kappa(t) = exp(-gamma t + r_mem sin(nu t))."""
    return math.exp(-params.gamma * t + params.r_mem * math.sin(params.nu * t))


def nm_drift(params, t, lam=None, omega=None):
    lam = params.lam if lam is None else lam
    omega = params.omega if omega is None else omega
    return memory_factor(params, t) * expm2(drift_tensor(lam, omega), t)


def nm_diffusion(params, t, lam=None, omega=None):
    """Near-minimal diffusion matrix of the selected model at time t."""
    lam = params.lam if lam is None else lam
    omega = params.omega if omega is None else omega
    kt = memory_factor(params, t)
    model = params.diffusion
    if isinstance(model, IsotropicDiffusion):
        y = 0.5 * abs(1.0 - kt * kt) + params.eps_buffer
        return y * np.eye(2)
    g = 0.5 * (1.0 - kt * kt) + params.eps_buffer
    if g <= 0:
        raise PhysicalityError(
            f"determinant target {g:.3e} not positive (kappa(t) = {kt:.4f} > 1)"
        )
    if isinstance(model, AnisotropicDiffusion):
        return np.diag([g * math.exp(model.s), g * math.exp(-model.s)])
    if isinstance(model, DriftAlignedDiffusion):
        b = drift_tensor(lam, omega)
        w = b @ b.T
        tr = float(np.trace(w))
        if tr == 0.0:
            raise DegenerateModelError("drift-aligned diffusion undefined at B = 0")
        m = np.eye(2) + model.alpha * w / tr
        return (g / math.sqrt(float(np.linalg.det(m)))) * m
    raise DimensionError(f"unknown diffusion model {model!r}")


def nm_channel(params, t, lam=None, omega=None):
    """Fixed-time map (X_t, Y_t, 0) of the non-Markovian family.

    Construction does not require stability (only downstream Stein calls do);
    complete positivity is verified through the one-mode determinant check.
    """
    if t <= 0:
        raise DimensionError("family time must be positive")
    channel = GaussianChannel(
        X=nm_drift(params, t, lam, omega),
        Y=nm_diffusion(params, t, lam, omega),
        delta=np.zeros(2),
    )
    report = cp_check(channel, method=CpMethod.DET_CONDITION)
    if not report.passes:
        raise PhysicalityError(f"channel violates CP (margin {report.margin:.3e})")
    return channel


def nm_ep_gauge(params, t, branch):
    """Jordan closed-form Stein covariance on an EP line lambda = +-omega.

    Uses alpha = kappa(t) and N = B(+-omega, omega); requires kappa(t) < 1 for
    the single channel use to be stable.
    """
    branch = EpBranch(branch)
    if params.omega == 0:
        raise DegenerateModelError("EP branches need omega != 0 (B = 0 is not defective)")
    lam = params.omega if branch is EpBranch.PLUS else -params.omega
    kt = memory_factor(params, t)
    if kt >= 1.0:
        raise StabilityError(f"kappa(t) = {kt:.4f} >= 1: single use unstable")
    drift = JordanDrift2x2(alpha=kt, nilpotent=drift_tensor(lam, params.omega), t=t)
    return stein_jordan_closed_form(drift, nm_diffusion(params, t, lam, params.omega))


# ---------------------------------------------------------------------------
# EP-free catalog (and the critically damped counterexample)
# ---------------------------------------------------------------------------


def thermal_loss_channel(eta, nbar=0.0):
    """Attenuator (sqrt(eta) I, (1-eta)(2 nbar + 1)/2 I, 0); X ~ I, never defective."""
    if not 0.0 <= eta <= 1.0:
        raise DimensionError("transmissivity eta must lie in [0, 1]")
    if nbar < 0:
        raise DimensionError("occupancy nbar must be nonnegative")
    return GaussianChannel(
        X=math.sqrt(eta) * np.eye(2),
        Y=0.5 * (1.0 - eta) * (2.0 * nbar + 1.0) * np.eye(2),
        delta=np.zeros(2),
    )


def quadrature_diffusion_channel(sigma2):
    """Pure quadrature diffusion (I, diag(0, sigma^2), 0); X = I, never defective."""
    if sigma2 < 0:
        raise DimensionError("diffusion strength sigma^2 must be nonnegative")
    return GaussianChannel(X=np.eye(2), Y=np.diag([0.0, sigma2]), delta=np.zeros(2))


def critical_oscillator(omega0, t=None):
    """Critically damped oscillator: defective drift for every t > 0.

    Generator A = -omega0 I + N with N the upper nilpotent, so
    X_t = e^{-omega0 t}(I + t N). The diffusion D = omega0 I is the minimal
    isotropic choice satisfying the generator CP constraint with margin 0.
    """
    if omega0 <= 0:
        raise DimensionError("oscillator frequency omega0 must be positive")
    nilp = np.array([[0.0, 1.0], [0.0, 0.0]])
    gen = GaussianGenerator(
        A=-omega0 * np.eye(2) + nilp, D=omega0 * np.eye(2), u=np.zeros(2)
    )
    if t is None:
        return gen
    return semigroup_channel(gen, t)


_CATALOG = {
    "thermal-loss": thermal_loss_channel,
    "quadrature-diffusion": quadrature_diffusion_channel,
    "critical-oscillator": critical_oscillator,
}


def ep_free_catalog(name, t=None, **params):
    """Dispatch into the catalog by name; `t` only applies to the oscillator."""
    try:
        builder = _CATALOG[name]
    except KeyError:
        raise DimensionError(f"unknown catalog entry {name!r}; choose from {sorted(_CATALOG)}")
    if name == "critical-oscillator":
        return builder(t=t, **params)
    return builder(**params)
