"""Defectiveness detection and the drift-controlled spectrum machinery.

Exceptional points are parameter values where the drift matrix becomes
non-diagonalizable. `jordan_structure` decides defectiveness (exactly for
real 2x2 input, by eigenvalue clustering and rank sequences in general);
`additive_spectrum` enumerates sum_j n_j lambda_j(A); the restriction
matrices realize the phase-space generator on polynomial spaces, where the
graded monomial ordering makes the assembled matrix block lower triangular:
its spectrum is the additive drift spectrum no matter the diffusion D or
drive u. The truncation (and the block-triangularity argument behind it) is
the numerical stand-in for the operator statement, not a quoted result.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True)
class JordanReport:
    """Eigenvalues with multiplicities and Jordan block sizes.

    `defective` iff some block has size >= 2; `coalescence_gap` is the
    minimum pairwise distance of the raw computed eigenvalues.
    """

    eigenvalues: tuple
    multiplicities: tuple
    block_sizes: tuple
    defective: bool
    coalescence_gap: float

    def __post_init__(self):
        for mult, blocks in zip(self.multiplicities, self.block_sizes):
            if sum(blocks) != mult:
                raise ValueError("block sizes must sum to the algebraic multiplicity")


def _min_pairwise_gap(eigs):
    if len(eigs) < 2:
        return float("inf")
    gap = float("inf")
    for i in range(len(eigs)):
        for j in range(i + 1, len(eigs)):
            gap = min(gap, abs(eigs[i] - eigs[j]))
    return gap


def _jordan_2x2(m, tol):
    tau = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = tau * tau - 4.0 * det
    scale = 1.0 + float(np.max(np.abs(m)))
    center = 0.5 * tau
    off_identity = float(np.max(np.abs(m - center * np.eye(2))))
    if disc >= 0:
        rt = np.sqrt(disc)
        eigs = (center - 0.5 * rt + 0j, center + 0.5 * rt + 0j)
    else:
        rt = np.sqrt(-disc)
        eigs = (center - 0.5j * rt, center + 0.5j * rt)
    gap = abs(eigs[1] - eigs[0])
    if abs(disc) <= tol * scale * scale and off_identity > tol * scale:
        return JordanReport(
            eigenvalues=(center + 0j,),
            multiplicities=(2,),
            block_sizes=((2,),),
            defective=True,
            coalescence_gap=gap,
        )
    if abs(disc) <= tol * scale * scale:
        # proportional to the identity: diagonalizable double eigenvalue
        return JordanReport(
            eigenvalues=(center + 0j,),
            multiplicities=(2,),
            block_sizes=((1, 1),),
            defective=False,
            coalescence_gap=gap,
        )
    return JordanReport(
        eigenvalues=eigs,
        multiplicities=(1, 1),
        block_sizes=((1,), (1,)),
        defective=False,
        coalescence_gap=gap,
    )


def _cluster(eigs, tol):
    """Single-linkage clustering of eigenvalues within distance tol."""
    n = len(eigs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(eigs[i] - eigs[j]) <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _block_sizes(m, mu, multiplicity):
    """Jordan block sizes at eigenvalue mu from the rank sequence of powers.

    The shifted matrix is normalized once so that rank thresholds are absolute
    on unit scale; per-power renormalization would blow numerically-zero
    powers back to O(1) and fake extra rank.
    """
    n = m.shape[0]
    shifted = m - mu * np.eye(n)
    top = np.linalg.svd(shifted, compute_uv=False)[0]
    if top == 0.0:
        return (1,) * multiplicity
    shifted = shifted / top
    nulls = [0]
    power = np.eye(n, dtype=shifted.dtype)
    for _ in range(multiplicity):
        power = power @ shifted
        svals = np.linalg.svd(power, compute_uv=False)
        rank = int(np.sum(svals > 1e-10))
        nulls.append(min(n - rank, multiplicity))
        if nulls[-1] >= multiplicity:
            break
    # nu_k = number of blocks of size >= k
    nu = [nulls[k] - nulls[k - 1] for k in range(1, len(nulls))]
    sizes = []
    for k, count_ge in enumerate(nu, start=1):
        count_next = nu[k] if k < len(nu) else 0
        sizes.extend([k] * (count_ge - count_next))
    sizes.sort(reverse=True)
    missing = multiplicity - sum(sizes)
    if missing > 0:
        # rank decisions starved the sequence; attribute the rest to 1-blocks
        sizes.extend([1] * missing)
    return tuple(sizes)


def jordan_structure(matrix, tol=None):
    """Eigenvalue multiplicities, Jordan block sizes, and the EP verdict.

    Real 2x2 matrices take the exact route: defective iff the characteristic
    discriminant vanishes (within `tol`, default 1e-12, scale-aware) while the
    matrix is not proportional to the identity. Otherwise eigenvalues are
    clustered within `tol` (default 1e-7 scale-aware) and block sizes read off
    the rank sequence of (M - mu I)^k.
    """
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"jordan_structure needs a square matrix, got {m.shape}")
    if m.shape == (2, 2) and not np.iscomplexobj(m):
        return _jordan_2x2(m.astype(float), 1e-12 if tol is None else tol)
    eigs = np.linalg.eigvals(m)
    scale = 1.0 + float(np.max(np.abs(m)))
    ctol = (1e-7 * scale) if tol is None else tol
    clusters = _cluster(list(eigs), ctol)
    reps, mults, blocks = [], [], []
    for idx in sorted(clusters, key=lambda g: (eigs[g].mean().real, eigs[g].mean().imag)):
        mu = eigs[idx].mean()
        mult = len(idx)
        reps.append(complex(mu))
        mults.append(mult)
        blocks.append((1,) if mult == 1 else _block_sizes(m.astype(complex), mu, mult))
    defective = any(size >= 2 for group in blocks for size in group)
    return JordanReport(
        eigenvalues=tuple(reps),
        multiplicities=tuple(mults),
        block_sizes=tuple(blocks),
        defective=defective,
        coalescence_gap=_min_pairwise_gap(list(eigs)),
    )


@dataclass(frozen=True)
class AdditiveSpectrum:
    """Ornstein-Uhlenbeck spectrum {sum_j n_j lambda_j} up to a degree bound."""

    base_eigenvalues: tuple
    max_total_degree: int
    values: tuple  # (multi_index, eigenvalue) pairs, graded-lex order

    @property
    def eigenvalues(self):
        return np.array([v for _, v in self.values])


def bounded_multi_indices(length, max_total):
    """All multi-indices n in N_0^length with sum(n) <= max_total, graded-lex."""
    out = []
    for total in range(max_total + 1):
        def rec(prefix, remaining, slots):
            if slots == 1:
                out.append(tuple(prefix) + (remaining,))
                return
            for v in range(remaining, -1, -1):
                rec(prefix + [v], remaining - v, slots - 1)

        rec([], total, length)
    return out


def additive_spectrum(eigenvalues, max_degree):
    """Enumerate sum_j n_j lambda_j over all multi-indices with |n| <= max_degree."""
    if max_degree < 0:
        raise DimensionError("max_degree must be >= 0")
    base = tuple(complex(v) for v in np.atleast_1d(eigenvalues))
    values = []
    for n in bounded_multi_indices(len(base), max_degree):
        values.append((n, sum(nj * lj for nj, lj in zip(n, base))))
    return AdditiveSpectrum(
        base_eigenvalues=base, max_total_degree=max_degree, values=tuple(values)
    )


def drift_restriction_matrix(A, degree):
    """Matrix of (A^T xi) . grad on homogeneous degree-`degree` polynomials.

    Basis p_j = xi_1^(degree-j) xi_2^j, j = 0..degree. For A^T = lambda I + N
    with N the upper 2x2 nilpotent this is a single Jordan chain of length
    degree + 1 at eigenvalue degree*lambda.
    """
    if degree < 0:
        raise DimensionError("degree must be >= 0")
    a = np.asarray(A, dtype=float)
    if a.shape != (2, 2):
        raise DimensionError("drift restriction implemented for one mode (2x2 drift)")
    size = degree + 1
    m = np.zeros((size, size))
    for j in range(size):
        m[j, j] = a[0, 0] * (degree - j) + a[1, 1] * j
        if j + 1 < size:
            m[j + 1, j] = a[1, 0] * (degree - j)
        if j - 1 >= 0:
            m[j - 1, j] = a[0, 1] * j
    return m


def ou_monomial_basis(max_degree):
    """Monomial exponents (m, k) for xi_1^m xi_2^k, graded, lowest degree first."""
    return [(total - j, j) for total in range(max_degree + 1) for j in range(total + 1)]


def truncated_ou_matrix(generator, max_degree):
    """Generator -(1/2) xi^T D xi + (A^T xi).grad + i u^T xi on monomials.

    One mode only, degree capped at 12. The diffusion term raises polynomial
    degree by 2 and the drive term by 1, so in the graded basis both land
    strictly below the diagonal drift blocks: the eigenvalue multiset is the
    additive drift spectrum independently of D and u.
    """
    if generator.modes != 1:
        raise DimensionError("truncated OU matrix implemented for one mode")
    if not 0 <= max_degree <= 12:
        raise DimensionError("max_degree must be within 0..12")
    a, d, u = generator.A, generator.D, generator.u
    basis = ou_monomial_basis(max_degree)
    index = {mk: i for i, mk in enumerate(basis)}
    size = len(basis)
    mat = np.zeros((size, size), dtype=complex)
    for col, (m, k) in enumerate(basis):
        mat[index[(m, k)], col] += a[0, 0] * m + a[1, 1] * k
        if m >= 1:
            mat[index[(m - 1, k + 1)], col] += a[1, 0] * m
        if k >= 1:
            mat[index[(m + 1, k - 1)], col] += a[0, 1] * k
        if (m + 2, k) in index:
            mat[index[(m + 2, k)], col] += -0.5 * d[0, 0]
        if (m, k + 2) in index:
            mat[index[(m, k + 2)], col] += -0.5 * d[1, 1]
        if (m + 1, k + 1) in index:
            mat[index[(m + 1, k + 1)], col] += -d[0, 1]
        if (m + 1, k) in index:
            mat[index[(m + 1, k)], col] += 1j * u[0]
        if (m, k + 1) in index:
            mat[index[(m, k + 1)], col] += 1j * u[1]
    return mat
