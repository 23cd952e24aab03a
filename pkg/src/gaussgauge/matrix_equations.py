"""Stability classification and the Lyapunov/Stein/Jordan gauge-matrix solvers.

The one-mode (2x2) problems go through closed forms: explicit elimination of
the reduced 3x3 system for A S + S A^T + D = 0, the adjugate formulas with
denominator (1-det)(1-tr+det)(1+tr+det) for S = X S X^T + Y, and a geometric
series in rho = alpha^2 on defective drifts X = alpha (I + t N), N^2 = 0.
Larger problems are vectorized: (I (x) A + A (x) I) vec S = -vec D and
(I - X (x) X) vec S = vec Y, solved densely (desk scale, 2N <= 20).
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DegenerateSpectrumError, DimensionError, StabilityError
from . import _kernels


class StabilityMode(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


class GaugeSource(str, Enum):
    LYAPUNOV = "lyapunov"
    STEIN = "stein"
    STEIN_SERIES = "stein-series"
    JORDAN_CLOSED_FORM = "jordan-closed-form"
    EP_BRANCH_FORMULA = "ep-branch-formula"


KRONECKER_DIM_CAP = 20  # dense vec-solve limit: (2N)^2 x (2N)^2 system


@dataclass(frozen=True)
class StabilityReport:
    """Spectral stability data of a drift matrix.

    `hurwitz` refers to the continuous-time criterion max Re(lambda) < 0;
    `spectral_radius` to the discrete one. For 2x2 matrices in discrete mode
    `jury_triple` carries (1-det, 1-tr+det, 1+tr+det), all positive iff
    spr < 1.
    """

    hurwitz: bool
    spectral_radius: float
    eigenvalues: np.ndarray
    jury_triple: tuple | None = None

    @property
    def stable_discrete(self):
        return self.spectral_radius < 1.0


def stability(matrix, mode=StabilityMode.CONTINUOUS):
    """Classify drift stability in continuous or discrete time."""
    mode = StabilityMode(mode)
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"stability needs a square matrix, got shape {m.shape}")
    eigs = np.linalg.eigvals(m)
    triple = None
    if mode is StabilityMode.DISCRETE and m.shape == (2, 2):
        triple = _kernels.jury_triple(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
    return StabilityReport(
        hurwitz=bool(np.max(eigs.real) < 0.0),
        spectral_radius=float(np.max(np.abs(eigs))),
        eigenvalues=eigs,
        jury_triple=triple,
    )


@dataclass(frozen=True)
class GaugeCovariance:
    """Symmetric gauge covariance with solver provenance and residual."""

    S: np.ndarray
    source: GaugeSource
    residual: float

    def __post_init__(self):
        s = np.asarray(self.S, dtype=float)
        s = 0.5 * (s + s.T)
        s.setflags(write=False)
        object.__setattr__(self, "S", s)
        object.__setattr__(self, "source", GaugeSource(self.source))


def lyapunov_residual(A, S, D):
    return float(np.max(np.abs(A @ S + S @ A.T + D)))


def stein_residual(X, S, Y):
    return float(np.max(np.abs(S - X @ S @ X.T - Y)))


def _square_pair(a, b, name_a, name_b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name_a} must be square, got {a.shape}")
    if b.shape != a.shape:
        raise DimensionError(f"{name_b} shape {b.shape} does not match {name_a} {a.shape}")
    if a.shape[0] > KRONECKER_DIM_CAP:
        raise DimensionError(f"dense vectorized solves capped at dimension {KRONECKER_DIM_CAP}")
    return a, b


def solve_lyapunov(A, D):
    """Unique symmetric solution of A S + S A^T + D = 0 for Hurwitz A.

    2x2 inputs take the closed-form elimination path; larger ones the
    Kronecker-sum dense solve. The equation defect in max-norm is recorded on
    the result.
    """
    A, D = _square_pair(A, D, "A", "D")
    if not stability(A, StabilityMode.CONTINUOUS).hurwitz:
        raise StabilityError("Lyapunov gauging requires a Hurwitz drift")
    if A.shape == (2, 2):
        s11, s12, s22, ok = _kernels.lyap2_closed(
            A[0, 0], A[0, 1], A[1, 0], A[1, 1], D[0, 0], D[0, 1], D[1, 1]
        )
        if not ok:
            raise DegenerateSpectrumError("resonant spectrum: lambda_i + lambda_j = 0")
        S = np.array([[s11, s12], [s12, s22]])
    else:
        n = A.shape[0]
        lhs = np.kron(np.eye(n), A) + np.kron(A, np.eye(n))
        try:
            vec = np.linalg.solve(lhs, -D.reshape(-1))
        except np.linalg.LinAlgError as exc:
            raise DegenerateSpectrumError(f"singular Kronecker-sum system: {exc}") from exc
        S = vec.reshape(n, n)
        S = 0.5 * (S + S.T)
    return GaugeCovariance(S=S, source=GaugeSource.LYAPUNOV, residual=lyapunov_residual(A, S, D))


def solve_stein(X, Y):
    """Unique symmetric solution of S = X S X^T + Y for spr(X) < 1.

    2x2 inputs evaluate the adjugate closed forms; larger ones solve
    (I - X (x) X) vec S = vec Y. S inherits positive semidefiniteness from Y.
    """
    X, Y = _square_pair(X, Y, "X", "Y")
    if stability(X, StabilityMode.DISCRETE).spectral_radius >= 1.0:
        raise StabilityError("Stein gauging requires spectral radius < 1")
    if X.shape == (2, 2):
        s11, s12, s22, denom = _kernels.stein2_closed(
            X[0, 0], X[0, 1], X[1, 0], X[1, 1], Y[0, 0], Y[0, 1], Y[1, 1]
        )
        if denom <= 0.0:
            raise StabilityError("Stein denominator not positive; drift not Schur stable")
        S = np.array([[s11, s12], [s12, s22]])
    else:
        n = X.shape[0]
        lhs = np.eye(n * n) - np.kron(X, X)
        vec = np.linalg.solve(lhs, Y.reshape(-1))
        S = vec.reshape(n, n)
        S = 0.5 * (S + S.T)
    return GaugeCovariance(S=S, source=GaugeSource.STEIN, residual=stein_residual(X, S, Y))


def stein_series(X, Y, tol=1e-12, max_terms=100_000):
    """Partial sums of S = sum_n X^n Y (X^T)^n; the solver-independent oracle.

    Stops when the increment max-norm drops below `tol`; raises
    ConvergenceError at the term cap (spectral radius >= 1 suspected).
    """
    X, Y = _square_pair(X, Y, "X", "Y")
    S, _, converged = _kernels.stein_series_iter(
        np.ascontiguousarray(X), np.ascontiguousarray(Y), tol, max_terms
    )
    if not converged:
        raise ConvergenceError(f"Stein series not converged after {max_terms} terms")
    S = 0.5 * (S + S.T)
    return GaugeCovariance(
        S=S, source=GaugeSource.STEIN_SERIES, residual=stein_residual(X, S, Y)
    )


@dataclass(frozen=True)
class JordanDrift2x2:
    """Defective one-mode drift X = alpha (I + t N) with N != 0, N^2 = 0."""

    alpha: float
    nilpotent: np.ndarray
    t: float

    def __post_init__(self):
        n = np.asarray(self.nilpotent, dtype=float)
        if n.shape != (2, 2):
            raise DimensionError("nilpotent part must be 2x2")
        scale = float(np.max(np.abs(n)))
        if scale == 0.0:
            raise DegenerateSpectrumError("nilpotent part must be nonzero")
        if np.max(np.abs(n @ n)) > 1e-12 * scale * scale:
            raise DimensionError("nilpotent part must square to zero")
        n = n.copy()
        n.setflags(write=False)
        object.__setattr__(self, "nilpotent", n)

    @property
    def X(self):
        return self.alpha * (np.eye(2) + self.t * self.nilpotent)


def stein_jordan_closed_form(drift, Y):
    """Stein solution on a Jordan drift, in closed form.

    S = Y/(1-rho) + rho t (N Y + Y N^T)/(1-rho)^2
      + rho (1+rho) t^2 N Y N^T / (1-rho)^3 with rho = alpha^2.
    """
    if abs(drift.alpha) >= 1.0:
        raise StabilityError(f"|alpha| = {abs(drift.alpha)} >= 1: single use unstable")
    Y = np.asarray(Y, dtype=float)
    if Y.shape != (2, 2):
        raise DimensionError("Jordan closed form is a one-mode path; Y must be 2x2")
    n = drift.nilpotent
    s11, s12, s22 = _kernels.jordan_stein2(
        drift.alpha, n[0, 0], n[0, 1], n[1, 0], n[1, 1], drift.t, Y[0, 0], Y[0, 1], Y[1, 1]
    )
    S = np.array([[s11, s12], [s12, s22]])
    return GaugeCovariance(
        S=S,
        source=GaugeSource.JORDAN_CLOSED_FORM,
        residual=stein_residual(drift.X, S, Y),
    )


def expm2(B, t=1.0):
    """Closed-form exp(t B) for real 2x2 B.

    Splits B into scalar and traceless parts and picks the hyperbolic,
    trigonometric, or degenerate (I + t B0) branch from det of the traceless
    part; series-evaluated sin(x)/x, sinh(x)/x keep the branches continuous.
    """
    B = np.asarray(B, dtype=float)
    if B.shape != (2, 2):
        raise DimensionError(f"expm2 expects a 2x2 matrix, got {B.shape}")
    e11, e12, e21, e22 = _kernels.expm2_kernel(B[0, 0], B[0, 1], B[1, 0], B[1, 1], float(t))
    return np.array([[e11, e12], [e21, e22]])


def drift_exponential(A, t=1.0):
    """exp(t A): closed 2x2 branch formula, scaling-and-squaring elsewhere."""
    A = np.asarray(A, dtype=float)
    if A.shape == (2, 2):
        return expm2(A, t)
    return scipy.linalg.expm(t * A)
