"""Continuous-time Gaussian generators (A, D, u) and their finite-time channels.

Moment dynamics: dd/dt = A d + u, dV/dt = A V + V A^T + D. Builders accept
either linear Lindblad data (A = Sigma(H + Im C^dag C), D = Sigma Re(C^dag C)
Sigma^T, u = Sigma f) or a white-noise system-bath model
(A = Sigma H_S + (1/2) Sigma C Sigma_in C^T, D = Sigma C sigma_in C^T Sigma^T).
`semigroup_channel` extracts the finite-time map (X_t, Y_t, delta_t) and
`propagate_moments` integrates the ODEs directly as an independent oracle.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PhysicalityError
from .matrix_equations import StabilityMode, drift_exponential, solve_lyapunov, stability
from .phase_space import (
    CpMethod,
    CpReport,
    GaussianChannel,
    MomentState,
    Ordering,
    symplectic_form,
)
from . import _kernels


@dataclass(frozen=True)
class GaussianGenerator:
    """Drift A (1/time), symmetric diffusion rate D, and drive rate u."""

    A: np.ndarray
    D: np.ndarray
    u: np.ndarray
    ordering: Ordering = Ordering.GROUPED

    def __post_init__(self):
        a = np.asarray(self.A, dtype=float)
        d = np.asarray(self.D, dtype=float)
        u = np.atleast_1d(np.asarray(self.u, dtype=float))
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2 != 0:
            raise DimensionError(f"drift must be square of even dimension, got {a.shape}")
        if d.shape != a.shape or u.shape != (a.shape[0],):
            raise DimensionError(
                f"inconsistent generator shapes A{a.shape} D{d.shape} u{u.shape}"
            )
        if np.max(np.abs(d - d.T)) > 1e-12 * (1.0 + np.max(np.abs(d))):
            raise DimensionError("diffusion rate matrix must be symmetric")
        for name, arr in (("A", a), ("D", 0.5 * (d + d.T)), ("u", u)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "ordering", Ordering(self.ordering))

    @property
    def modes(self):
        return self.A.shape[0] // 2


@dataclass(frozen=True)
class LindbladData:
    """Quadratic Hamiltonian matrix H, linear drive f, and linear jump rows.

    Each jump row is the complex coefficient vector l_j of a Lindblad operator
    L_j = l_j . x; `rate` multiplies C^dag C overall.
    """

    H: np.ndarray
    f: np.ndarray = None
    jump_rows: tuple = ()
    rate: float = 1.0

    def __post_init__(self):
        h = np.asarray(self.H, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] % 2 != 0:
            raise DimensionError(f"Hamiltonian matrix must be square/even, got {h.shape}")
        if np.max(np.abs(h - h.T)) > 1e-12 * (1.0 + np.max(np.abs(h))):
            raise DimensionError("Hamiltonian matrix must be symmetric")
        f = np.zeros(h.shape[0]) if self.f is None else np.asarray(self.f, dtype=float)
        if f.shape != (h.shape[0],):
            raise DimensionError(f"drive vector shape {f.shape} does not match H {h.shape}")
        rows = tuple(np.asarray(r, dtype=complex) for r in self.jump_rows)
        for r in rows:
            if r.shape != (h.shape[0],):
                raise DimensionError(f"jump row shape {r.shape} does not match H {h.shape}")
        if self.rate <= 0:
            raise DimensionError("rate must be positive")
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "jump_rows", rows)


def from_lindblad(data, ordering=Ordering.GROUPED):
    """Generator of the linear Lindblad equation.

    A = Sigma (H + kappa Im(C^dag C)), D = kappa Sigma Re(C^dag C) Sigma^T,
    u = Sigma f, with C the stacked jump rows.
    """
    n = data.H.shape[0] // 2
    sigma = symplectic_form(n, ordering).matrix
    if data.jump_rows:
        c = np.array(data.jump_rows)
        cdc = data.rate * (c.conj().T @ c)
    else:
        cdc = np.zeros((2 * n, 2 * n), dtype=complex)
    a = sigma @ (data.H + cdc.imag)
    d = sigma @ cdc.real @ sigma.T
    return GaussianGenerator(A=a, D=0.5 * (d + d.T), u=sigma @ data.f, ordering=ordering)


@dataclass(frozen=True)
class WhiteNoiseData:
    """System-bath white-noise model: H_S, drive u, coupling C, bath state.

    sigma_in is the stationary bath covariance (2M x 2M) and bath_form its
    symplectic form; it must satisfy sigma_in + (i/2) Sigma_in >= 0.
    """

    H_S: np.ndarray
    u: np.ndarray
    C: np.ndarray
    sigma_in: np.ndarray
    bath_form: np.ndarray = None

    def __post_init__(self):
        hs = np.asarray(self.H_S, dtype=float)
        u = np.asarray(self.u, dtype=float)
        c = np.asarray(self.C, dtype=float)
        s_in = np.asarray(self.sigma_in, dtype=float)
        if hs.ndim != 2 or hs.shape[0] != hs.shape[1] or hs.shape[0] % 2 != 0:
            raise DimensionError(f"H_S must be square/even, got {hs.shape}")
        if c.ndim != 2 or c.shape[0] != hs.shape[0] or c.shape[1] % 2 != 0:
            raise DimensionError(f"coupling shape {c.shape} does not match H_S {hs.shape}")
        if s_in.shape != (c.shape[1], c.shape[1]):
            raise DimensionError(f"bath covariance shape {s_in.shape} does not match C")
        form = self.bath_form
        if form is None:
            form = symplectic_form(c.shape[1] // 2, Ordering.GROUPED).matrix
        form = np.asarray(form, dtype=float)
        if form.shape != s_in.shape:
            raise DimensionError("bath symplectic form shape mismatch")
        object.__setattr__(self, "H_S", hs)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "sigma_in", s_in)
        object.__setattr__(self, "bath_form", form)


def from_white_noise(data, unchecked=False, ordering=Ordering.GROUPED):
    """Markov-limit generator of a bilinear system-bath model.

    A = Sigma H_S + (1/2) Sigma C Sigma_in C^T and
    D = Sigma C sigma_in C^T Sigma^T; the drive u passes through. Unphysical
    bath covariances are rejected unless `unchecked`.
    """
    if not unchecked:
        z = data.sigma_in + 0.5j * data.bath_form
        margin = float(np.linalg.eigvalsh(z).min())
        if margin < -1e-10 * (1.0 + float(np.max(np.abs(data.sigma_in)))):
            raise PhysicalityError(
                f"bath covariance violates the uncertainty principle (margin {margin:.3e})"
            )
    n = data.H_S.shape[0] // 2
    sigma = symplectic_form(n, ordering).matrix
    a = sigma @ data.H_S + 0.5 * sigma @ data.C @ data.bath_form @ data.C.T
    d = sigma @ data.C @ data.sigma_in @ data.C.T @ sigma.T
    return GaussianGenerator(A=a, D=0.5 * (d + d.T), u=data.u, ordering=ordering)


def cp_check_generator(generator, rel_tol=1e-10):
    """Least eigenvalue of D + (i/2)(A Sigma + Sigma A^T), the generator-level
    complete-positivity matrix."""
    sigma = symplectic_form(generator.modes, generator.ordering).matrix
    z = generator.D + 0.5j * (generator.A @ sigma + sigma @ generator.A.T)
    tol = rel_tol * (1.0 + float(np.max(np.abs(z))))
    margin = float(np.linalg.eigvalsh(z).min())
    return CpReport(
        passes=margin >= -tol, margin=margin, method=CpMethod.HERMITIAN_EIG, tolerance=tol
    )


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _delta_integral(A, u, t, x_t):
    """delta_t = int_0^t exp(A(t-s)) u ds.

    Closed form A^{-1}(X_t - I) u when A is safely invertible, otherwise
    64-node Gauss-Legendre quadrature.
    """
    if not np.any(u):
        return np.zeros_like(u)
    svals = np.linalg.svd(A, compute_uv=False)
    if svals[-1] > 1e-10 * max(svals[0], 1.0):
        return np.linalg.solve(A, (x_t - np.eye(A.shape[0])) @ u)
    half = 0.5 * t
    nodes = half * (_GL_NODES + 1.0)
    acc = np.zeros_like(u)
    for s, w in zip(nodes, _GL_WEIGHTS):
        acc = acc + w * (drift_exponential(A, t - s) @ u)
    return half * acc


def _adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, scale, depth):
    m = 0.5 * (a + b)
    flm = f(0.5 * (a + m))
    frm = f(0.5 * (m + b))
    left = ((m - a) / 6.0) * (fa + 4.0 * flm + fm)
    right = ((b - m) / 6.0) * (fm + 4.0 * frm + fb)
    err = np.max(np.abs(left + right - whole))
    if depth <= 0 or err < 15.0 * tol * scale:
        return left + right + (left + right - whole) / 15.0
    return _adaptive_simpson(
        f, a, m, fa, flm, fm, left, 0.5 * tol, scale, depth - 1
    ) + _adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, scale, depth - 1)


def _diffusion_integral(A, D, t, tol):
    """Y_t = int_0^t exp(As) D exp(A^T s) ds by adaptive Simpson.

    The target `tol` is relative to the integral's own scale (the integrand
    grows exponentially for unstable drift, where an absolute target would
    force unbounded refinement).
    """

    def f(s):
        e = drift_exponential(A, s)
        return e @ D @ e.T

    fa, fb = f(0.0), f(t)
    fm = f(0.5 * t)
    whole = (t / 6.0) * (fa + 4.0 * fm + fb)
    scale = 1.0 + float(np.max(np.abs(whole)))
    return _adaptive_simpson(f, 0.0, t, fa, fm, fb, whole, tol, scale, depth=30)


def semigroup_channel(generator, t, tol=1e-10):
    """Finite-time channel (X_t, Y_t, delta_t) of the Markov semigroup.

    X_t = exp(At). For Hurwitz A the diffusion integral is evaluated through
    the Lyapunov solution as Y_t = S - X_t S X_t^T (exact identity); otherwise
    by adaptive quadrature to `tol`. delta_t uses the closed form
    A^{-1}(X_t - I)u when A is invertible.
    """
    if t < 0:
        raise DimensionError("semigroup time must be nonnegative")
    A, D, u = generator.A, generator.D, generator.u
    n2 = A.shape[0]
    x_t = drift_exponential(A, t)
    if t == 0:
        return GaussianChannel(
            X=np.eye(n2), Y=np.zeros((n2, n2)), delta=np.zeros(n2), ordering=generator.ordering
        )
    if not np.any(D):
        y_t = np.zeros((n2, n2))
    elif stability(A, StabilityMode.CONTINUOUS).hurwitz:
        s = solve_lyapunov(A, D).S
        y_t = s - x_t @ s @ x_t.T
    else:
        y_t = _diffusion_integral(A, D, t, tol)
    delta_t = _delta_integral(A, u, t, x_t)
    return GaussianChannel(
        X=x_t, Y=0.5 * (y_t + y_t.T), delta=delta_t, ordering=generator.ordering
    )


def propagate_moments(generator, state, t, steps):
    """Fixed-step 4th-order integration of the moment ODEs.

    Serves as the independent oracle for `semigroup_channel`; error scales as
    (t/steps)^4.
    """
    if steps < 1:
        raise DimensionError("steps must be >= 1")
    if generator.A.shape[0] != state.d.shape[0]:
        raise DimensionError("generator and state mode counts differ")
    d, v = _kernels.rk4_moments(
        np.ascontiguousarray(generator.A),
        np.ascontiguousarray(generator.D),
        np.ascontiguousarray(generator.u),
        np.ascontiguousarray(state.d),
        np.ascontiguousarray(state.V),
        float(t),
        int(steps),
    )
    return MomentState(d=d, V=0.5 * (v + v.T))
