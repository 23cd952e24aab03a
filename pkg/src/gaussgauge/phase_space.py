"""Symplectic conventions, Gaussian channels and states on first/second moments.

A Gaussian channel is the triple (X, Y, delta) acting on moments as
d -> X d + delta and V -> X V X^T + Y. States are moment pairs (d, V) in
dimensionless quadrature units with vacuum V = I/2. Two quadrature orderings
are supported: grouped (q1..qN, p1..pN), the internal canonical one, and
interleaved (q1, p1, ..., qN, pN); `reorder` converts between them.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionError, NotGaugeableError
from ._kernels import symmetric_eig2


class Ordering(str, Enum):
    GROUPED = "grouped"
    INTERLEAVED = "interleaved"


class CpMethod(str, Enum):
    HERMITIAN_EIG = "hermitian-eig"
    DET_CONDITION = "det-condition"


def _freeze(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_even(dim, what):
    if dim < 2 or dim % 2 != 0:
        raise DimensionError(f"{what} must have even dimension >= 2, got {dim}")
    return dim // 2


@dataclass(frozen=True)
class SymplecticForm:
    """Antisymmetric form encoding the canonical commutation relations."""

    modes: int
    ordering: Ordering
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _freeze(self.matrix))


def symplectic_form(modes, ordering=Ordering.GROUPED):
    """Symplectic form for `modes` bosonic modes in the requested ordering.

    Grouped gives the block form [[0, I], [-I, 0]]; interleaved the direct sum
    of N copies of [[0, 1], [-1, 0]].
    """
    if modes < 1:
        raise DimensionError(f"mode count must be >= 1, got {modes}")
    ordering = Ordering(ordering)
    n = modes
    m = np.zeros((2 * n, 2 * n))
    if ordering is Ordering.GROUPED:
        m[:n, n:] = np.eye(n)
        m[n:, :n] = -np.eye(n)
    else:
        for i in range(n):
            m[2 * i, 2 * i + 1] = 1.0
            m[2 * i + 1, 2 * i] = -1.0
    return SymplecticForm(modes=n, ordering=ordering, matrix=m)


def interleaving_permutation(modes):
    """Permutation P with x_grouped = P @ r_interleaved.

    P[i, 2i] = 1 and P[N+i, 2i+1] = 1 (zero-based), so conjugation by P maps
    interleaved-ordered matrices to grouped ones.
    """
    n = modes
    p = np.zeros((2 * n, 2 * n))
    for i in range(n):
        p[i, 2 * i] = 1.0
        p[n + i, 2 * i + 1] = 1.0
    return p


def reorder(obj, src, dst):
    """Convert a vector or square matrix between quadrature orderings.

    Matrices conjugate by the permutation, vectors transform linearly; the
    round trip is an exact permutation of entries.
    """
    src, dst = Ordering(src), Ordering(dst)
    obj = np.asarray(obj, dtype=float)
    n = _check_even(obj.shape[0], "reorder input")
    if src == dst:
        return obj.copy()
    p = interleaving_permutation(n)
    if src is Ordering.INTERLEAVED:  # to grouped
        mat = p
    else:  # grouped to interleaved
        mat = p.T
    if obj.ndim == 1:
        return mat @ obj
    if obj.ndim == 2 and obj.shape[0] == obj.shape[1]:
        return mat @ obj @ mat.T
    raise DimensionError(f"cannot reorder object of shape {obj.shape}")


@dataclass(frozen=True)
class MomentState:
    """First moments d and symmetrized covariance V of a Gaussian state."""

    d: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.d, dtype=float))
        v = np.asarray(self.V, dtype=float)
        n2 = _check_even(d.shape[0], "moment vector")
        if v.shape != (2 * n2, 2 * n2):
            raise DimensionError(f"covariance shape {v.shape} does not match d of length {2 * n2}")
        if np.max(np.abs(v - v.T)) > 1e-12 * (1.0 + np.max(np.abs(v))):
            raise DimensionError("covariance matrix must be symmetric")
        object.__setattr__(self, "d", _freeze(d))
        object.__setattr__(self, "V", _freeze(0.5 * (v + v.T)))

    @property
    def modes(self):
        return self.d.shape[0] // 2


def vacuum_state(modes):
    """Vacuum: d = 0, V = I/2 (dimensionless quadrature units)."""
    return MomentState(d=np.zeros(2 * modes), V=0.5 * np.eye(2 * modes))


def uncertainty_margin(state, ordering=Ordering.GROUPED):
    """Least eigenvalue of V + (i/2) Sigma (Robertson-Schrodinger margin).

    Nonnegative within tolerance for physical states.
    """
    sigma = symplectic_form(state.modes, ordering).matrix
    z = state.V + 0.5j * sigma
    return float(np.linalg.eigvalsh(z).min())


@dataclass(frozen=True)
class GaussianChannel:
    """Gaussian channel (X, Y, delta); `physical` is a bookkeeping flag.

    Gauged representatives (X, 0, delta) produced by the similarity transform
    are deliberately non-CP and carry physical=False; the flag is not enforced
    at construction.
    """

    X: np.ndarray
    Y: np.ndarray
    delta: np.ndarray
    ordering: Ordering = Ordering.GROUPED
    physical: bool = True

    def __post_init__(self):
        x = np.asarray(self.X, dtype=float)
        y = np.asarray(self.Y, dtype=float)
        d = np.atleast_1d(np.asarray(self.delta, dtype=float))
        n2 = _check_even(x.shape[0], "channel drift")
        if x.shape != (2 * n2, 2 * n2) or y.shape != x.shape or d.shape != (2 * n2,):
            raise DimensionError(
                f"inconsistent channel shapes X{x.shape} Y{y.shape} delta{d.shape}"
            )
        if np.max(np.abs(y - y.T)) > 1e-12 * (1.0 + np.max(np.abs(y))):
            raise DimensionError("channel diffusion matrix must be symmetric")
        object.__setattr__(self, "X", _freeze(x))
        object.__setattr__(self, "Y", _freeze(0.5 * (y + y.T)))
        object.__setattr__(self, "delta", _freeze(d))
        object.__setattr__(self, "ordering", Ordering(self.ordering))

    @property
    def modes(self):
        return self.X.shape[0] // 2


def identity_channel(modes, ordering=Ordering.GROUPED):
    n2 = 2 * modes
    return GaussianChannel(np.eye(n2), np.zeros((n2, n2)), np.zeros(n2), ordering=ordering)


def _require_same_frame(a, b):
    if a.modes != b.modes or a.ordering != b.ordering:
        raise DimensionError(
            f"mode/ordering mismatch: {a.modes} modes ({a.ordering.value}) vs "
            f"{b.modes} modes ({b.ordering.value})"
        )


def apply_channel(channel, state):
    """Moment action d -> X d + delta, V -> X V X^T + Y (V resymmetrized)."""
    if channel.X.shape[0] != state.d.shape[0]:
        raise DimensionError(
            f"channel acts on {channel.modes} modes, state has {state.modes}"
        )
    d = channel.X @ state.d + channel.delta
    v = channel.X @ state.V @ channel.X.T + channel.Y
    return MomentState(d=d, V=0.5 * (v + v.T))


def compose(second, first):
    """Composition second o first: (X2 X1, X2 Y1 X2^T + Y2, X2 delta1 + delta2)."""
    _require_same_frame(second, first)
    return GaussianChannel(
        X=second.X @ first.X,
        Y=second.X @ first.Y @ second.X.T + second.Y,
        delta=second.X @ first.delta + second.delta,
        ordering=first.ordering,
        physical=first.physical and second.physical,
    )


@dataclass(frozen=True)
class CpReport:
    """Complete-positivity verdict with its margin.

    For the Hermitian route the margin is the least eigenvalue of
    Y + (i/2)(Sigma - X Sigma X^T); for the one-mode determinant route it is
    min(lambda_min(Y), det Y - ((1 - det X)/2)^2).
    """

    passes: bool
    margin: float
    method: CpMethod
    tolerance: float


def cp_matrix(channel):
    """Hermitian CP matrix Y + (i/2)(Sigma - X Sigma X^T)."""
    sigma = symplectic_form(channel.modes, channel.ordering).matrix
    return channel.Y + 0.5j * (sigma - channel.X @ sigma @ channel.X.T)


def cp_check(channel, method=None, rel_tol=1e-10):
    """Check complete positivity of a channel.

    The Hermitian route diagonalizes the CP matrix; the one-mode route uses
    the scalar reduction Y >= 0 and det Y >= ((1 - det X)/2)^2. Both must
    agree on pass/fail away from the tolerance band.
    """
    if method is None:
        method = CpMethod.DET_CONDITION if channel.modes == 1 else CpMethod.HERMITIAN_EIG
    method = CpMethod(method)
    z = cp_matrix(channel)
    tol = rel_tol * (1.0 + float(np.max(np.abs(z))))
    if method is CpMethod.HERMITIAN_EIG:
        margin = float(np.linalg.eigvalsh(z).min())
    else:
        if channel.modes != 1:
            raise DimensionError("determinant CP condition applies to one mode only")
        x, y = channel.X, channel.Y
        lam_min, _ = symmetric_eig2(y[0, 0], y[0, 1], y[1, 1])
        alpha = 0.5 * (1.0 - float(np.linalg.det(x)))
        slack = float(np.linalg.det(y)) - alpha * alpha
        margin = min(lam_min, slack)
    return CpReport(passes=margin >= -tol, margin=margin, method=method, tolerance=tol)


@dataclass(frozen=True)
class DisplacementGauge:
    """Result of removing the displacement by Weyl conjugation."""

    channel: GaussianChannel
    chi: np.ndarray = field(repr=False)
    condition_number: float = float("nan")


def displacement_gauge(channel, rel_tol=1e-12):
    """Conjugate by the displacement chi = -(I - X)^{-1} delta so delta -> 0.

    X and Y are untouched; raises NotGaugeableError when I - X is singular
    (X has eigenvalue 1).
    """
    n2 = channel.X.shape[0]
    m = np.eye(n2) - channel.X
    svals = np.linalg.svd(m, compute_uv=False)
    if svals[-1] <= rel_tol * max(svals[0], 1.0):
        raise NotGaugeableError("I - X is singular within tolerance; displacement not gaugeable")
    chi = -np.linalg.solve(m, channel.delta)
    gauged = GaussianChannel(
        X=channel.X,
        Y=channel.Y,
        delta=np.zeros(n2),
        ordering=channel.ordering,
        physical=channel.physical,
    )
    return DisplacementGauge(channel=gauged, chi=chi, condition_number=float(svals[0] / svals[-1]))
