"""Noise gauging: similarity transforms that remove diffusion from channels.

The smoothing map V_S = (I, S, 0) conjugates a channel to
(X, Y + X S X^T - S, delta). With S solving the Stein equation the diffusion
of a single stable channel vanishes; with S solving the Lyapunov equation the
whole semigroup loses its diffusion uniformly in time. Both transforms leave
X and delta bitwise unchanged, hence eigenvalues and Jordan structure of the
drift, so exceptional points are unaffected. The inverse map (I, -S, 0) is
generically not a physical channel; gauged outputs carry physical=False.
"""

from dataclasses import dataclass

import numpy as np

from .errors import StabilityError
from .generators import semigroup_channel
from .matrix_equations import GaugeCovariance, solve_lyapunov, solve_stein, stability
from .phase_space import GaussianChannel, compose
from .spectral import JordanReport, jordan_structure


@dataclass(frozen=True)
class SmoothingMap:
    """Gaussian smoothing map V_S = (I, S, 0) and its formal inverse."""

    S: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.S, dtype=float)
        s.setflags(write=False)
        object.__setattr__(self, "S", s)

    def forward(self, ordering="grouped"):
        n2 = self.S.shape[0]
        return GaussianChannel(np.eye(n2), self.S, np.zeros(n2), ordering=ordering)

    def inverse(self, ordering="grouped"):
        n2 = self.S.shape[0]
        return GaussianChannel(
            np.eye(n2), -self.S, np.zeros(n2), ordering=ordering, physical=False
        )

    def conjugate(self, channel):
        """V_S^{-1} o channel o V_S at the parameter level."""
        return compose(self.inverse(channel.ordering), compose(channel, self.forward(channel.ordering)))


@dataclass(frozen=True)
class GaugingResult:
    """Gauged channel, the Stein covariance, and the leftover diffusion norm."""

    gauged: GaussianChannel
    S: GaugeCovariance
    residual_Y: float


def gauge_channel(channel):
    """Remove Y from a stable channel by the Stein smoothing similarity.

    Returns the gauged representative (X, ~0, delta) with X and delta bitwise
    equal to the input's.
    """
    cov = solve_stein(channel.X, channel.Y)
    conjugated = SmoothingMap(cov.S).conjugate(channel)
    gauged = GaussianChannel(
        X=conjugated.X,
        Y=np.zeros_like(channel.Y),
        delta=conjugated.delta,
        ordering=channel.ordering,
        physical=False,
    )
    return GaugingResult(gauged=gauged, S=cov, residual_Y=float(np.max(np.abs(conjugated.Y))))


def default_gauge_times(A, count=20, t_min=1e-3):
    """Log-spaced verification times in [t_min, 10/|max Re lambda(A)|]."""
    decay = -float(np.max(np.linalg.eigvals(np.asarray(A, dtype=float)).real))
    if decay <= 0:
        raise StabilityError("default gauge times need a Hurwitz drift")
    return np.geomspace(t_min, 10.0 / decay, count)


@dataclass(frozen=True)
class SemigroupGaugingResult:
    """Single time-independent covariance and the per-time gauging residuals."""

    S: GaugeCovariance
    times: np.ndarray
    residuals: np.ndarray
    max_residual: float


def gauge_semigroup(generator, times=None):
    """Gauge the whole semigroup with the one Lyapunov covariance.

    For each verification time the finite-time channel is conjugated by the
    same V_S and the worst leftover diffusion entry recorded; the theorem
    makes every residual vanish identically.
    """
    if not stability(generator.A).hurwitz:
        raise StabilityError("semigroup gauging requires a Hurwitz drift")
    cov = solve_lyapunov(generator.A, generator.D)
    times = default_gauge_times(generator.A) if times is None else np.asarray(times, dtype=float)
    smoothing = SmoothingMap(cov.S)
    residuals = np.empty(times.shape[0])
    for i, t in enumerate(times):
        conjugated = smoothing.conjugate(semigroup_channel(generator, t))
        residuals[i] = np.max(np.abs(conjugated.Y))
    return SemigroupGaugingResult(
        S=cov,
        times=times,
        residuals=residuals,
        max_residual=float(residuals.max()) if residuals.size else 0.0,
    )


@dataclass(frozen=True)
class SpectrumCheck:
    """Isospectrality evidence for a gauging transform."""

    x_bitwise_unchanged: bool
    delta_bitwise_unchanged: bool
    eigenvalue_deviation: float
    jordan_before: JordanReport
    jordan_after: JordanReport

    @property
    def jordan_match(self):
        return (
            self.jordan_before.defective == self.jordan_after.defective
            and self.jordan_before.block_sizes == self.jordan_after.block_sizes
        )


def similarity_spectrum_check(channel):
    """Verify that gauging leaves the drift (hence spectrum and Jordan data) alone."""
    result = gauge_channel(channel)
    before = np.sort_complex(np.linalg.eigvals(channel.X))
    after = np.sort_complex(np.linalg.eigvals(result.gauged.X))
    return SpectrumCheck(
        x_bitwise_unchanged=bool(np.array_equal(channel.X, result.gauged.X)),
        delta_bitwise_unchanged=bool(np.array_equal(channel.delta, result.gauged.delta)),
        eigenvalue_deviation=float(np.max(np.abs(before - after))),
        jordan_before=jordan_structure(channel.X),
        jordan_after=jordan_structure(result.gauged.X),
    )
