"""Self-verification suites: residuals, dual-route agreements, figure trends.

`run_verification` executes every suite with a seeded generator and returns a
machine-readable report; the CLI `verify` command renders it as JSON and maps
the outcome to the exit code. `--fault` deliberately perturbs one computation
so the corresponding suite must fail (a self-test of the checker itself).
"""

import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from .gauging import SmoothingMap, default_gauge_times, gauge_channel, gauge_semigroup
from .generators import GaussianGenerator, LindbladData, from_lindblad
from .matrix_equations import (
    StabilityMode,
    expm2,
    lyapunov_residual,
    solve_lyapunov,
    solve_stein,
    stability,
    stein_residual,
    stein_series,
)
from .models import (
    EpBranch,
    NmFamilyParams,
    SqueezedReservoirParams,
    nm_channel,
    nm_ep_gauge,
    squeezed_ep_gauge,
    squeezed_generator,
)
from .phase_space import (
    CpMethod,
    GaussianChannel,
    MomentState,
    apply_channel,
    compose,
    cp_check,
    symplectic_form,
)
from .spectral import drift_restriction_matrix, jordan_structure, truncated_ou_matrix
from .sweeps import SweepConfig, run_nm_branch, run_squeezed_gauge


# ---------------------------------------------------------------------------
# Random ensembles (shared with the test suite)
# ---------------------------------------------------------------------------


def random_hurwitz(rng, dim, margin=(0.2, 1.0)):
    """Random matrix shifted left of the imaginary axis."""
    g = rng.standard_normal((dim, dim))
    shift = float(np.max(np.linalg.eigvals(g).real)) + rng.uniform(*margin)
    return g - shift * np.eye(dim)


def random_psd(rng, dim, scale=1.0):
    g = rng.standard_normal((dim, dim))
    return scale * (g @ g.T) / dim


def random_schur_stable(rng, dim, spr_range=(0.1, 0.95)):
    """Random matrix rescaled to a spectral radius drawn from spr_range."""
    g = rng.standard_normal((dim, dim))
    spr = float(np.max(np.abs(np.linalg.eigvals(g))))
    target = rng.uniform(*spr_range)
    return g * (target / spr) if spr > 0 else g


def random_stable_channel(rng, modes):
    dim = 2 * modes
    return GaussianChannel(
        X=random_schur_stable(rng, dim),
        Y=random_psd(rng, dim),
        delta=rng.standard_normal(dim),
    )


def random_physical_generator(rng, modes, jumps=2):
    """Generator from random linear Lindblad data (CP holds by construction).

    Each mode carries a lowering-operator jump at a random rate on top of the
    fully random rows, so a sizable fraction of draws is Hurwitz while strong
    random Hamiltonians still produce unstable ones.
    """
    dim = 2 * modes
    h = rng.standard_normal((dim, dim))
    rows = [rng.standard_normal(dim) + 1j * rng.standard_normal(dim) for _ in range(jumps)]
    for j in range(modes):
        lowering = np.zeros(dim, dtype=complex)
        lowering[j] = 1.0 / np.sqrt(2.0)
        lowering[modes + j] = 1.0j / np.sqrt(2.0)
        rows.append(np.sqrt(rng.uniform(1.0, 4.0)) * lowering)
    data = LindbladData(H=0.5 * (h + h.T), f=rng.standard_normal(dim), jump_rows=tuple(rows))
    return from_lindblad(data)


def random_state(rng, modes):
    dim = 2 * modes
    return MomentState(d=rng.standard_normal(dim), V=random_psd(rng, dim) + 0.5 * np.eye(dim))


def eigenvalue_multiset_distance(a, b):
    """Max matched distance between two eigenvalue multisets (optimal pairing)."""
    from scipy.optimize import linear_sum_assignment

    cost = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    samples: int
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))
        object.__setattr__(self, "worst", float(self.worst))
        object.__setattr__(self, "tolerance", float(self.tolerance))
        object.__setattr__(self, "samples", int(self.samples))


def _suite_lyapunov(rng, fault):
    worst = 0.0
    agree = 0.0
    n = 300
    for _ in range(n):
        modes = int(rng.integers(1, 4))
        a = random_hurwitz(rng, 2 * modes)
        d = random_psd(rng, 2 * modes)
        s = solve_lyapunov(a, d).S
        if fault == "lyapunov":
            s = s + 1e-6
        res = lyapunov_residual(a, s, d) / (1.0 + np.max(np.abs(d)))
        worst = max(worst, res)
        if modes == 1:
            n2 = a.shape[0]
            lhs = np.kron(np.eye(n2), a) + np.kron(a, np.eye(n2))
            s_vec = np.linalg.solve(lhs, -d.reshape(-1)).reshape(n2, n2)
            agree = max(agree, float(np.max(np.abs(s - 0.5 * (s_vec + s_vec.T)))))
    passed = worst <= 1e-10 and agree <= 1e-11
    return SuiteResult("lyapunov-residual", passed, max(worst, agree), 1e-10, n)


def _suite_stein(rng, fault):
    worst = 0.0
    series_gap = 0.0
    n = 300
    for _ in range(n):
        modes = int(rng.integers(1, 4))
        x = random_schur_stable(rng, 2 * modes)
        y = random_psd(rng, 2 * modes)
        s = solve_stein(x, y).S
        if fault == "stein":
            s = s + 1e-6
        res = stein_residual(x, s, y) / (1.0 + np.max(np.abs(y)))
        worst = max(worst, res)
        if modes == 1:
            series = stein_series(x, y, tol=1e-13).S
            series_gap = max(series_gap, float(np.max(np.abs(series - s))))
    passed = worst <= 1e-10 and series_gap <= 1e-10
    return SuiteResult("stein-residual", passed, max(worst, series_gap), 1e-10, n)


def _suite_positivity(rng, fault):
    worst = 0.0
    n = 200
    for _ in range(n):
        modes = int(rng.integers(1, 4))
        x = random_schur_stable(rng, 2 * modes)
        y = random_psd(rng, 2 * modes)
        s = solve_stein(x, y).S
        worst = max(worst, -float(np.linalg.eigvalsh(s).min()))
    return SuiteResult("positivity-transfer", worst <= 1e-10, worst, 1e-10, n)


def _suite_jury(rng, fault):
    n = 2000
    mismatches = 0
    denom_bad = 0
    for _ in range(n):
        x = rng.uniform(-1.6, 1.6, size=(2, 2))
        rep = stability(x, StabilityMode.DISCRETE)
        triple_stable = all(v > 0 for v in rep.jury_triple)
        spr_stable = rep.spectral_radius < 1.0
        if abs(rep.spectral_radius - 1.0) < 1e-10:
            continue
        if triple_stable != spr_stable:
            mismatches += 1
        if spr_stable and np.prod(rep.jury_triple) <= 0:
            denom_bad += 1
    worst = float(mismatches + denom_bad)
    return SuiteResult("jury-spectral-agreement", worst == 0, worst, 0.0, n)


def _suite_expm2(rng, fault):
    worst = 0.0
    n = 300
    for _ in range(n):
        b = rng.uniform(-2, 2, size=(2, 2))
        t = rng.uniform(0.0, 5.0)
        reference = scipy.linalg.expm(t * b)
        err = float(np.max(np.abs(expm2(b, t) - reference))) / (1.0 + np.abs(reference).max())
        worst = max(worst, err)
    return SuiteResult("expm2-vs-general", worst <= 4e-12, worst, 4e-12, n)


def _suite_channel_gauging(rng, fault):
    worst = 0.0
    drift_changed = 0
    n = 300
    for _ in range(n):
        modes = int(rng.integers(1, 4))
        ch = random_stable_channel(rng, modes)
        if fault == "gauge":
            bad = SmoothingMap(solve_stein(ch.X, ch.Y).S + 1e-6).conjugate(ch)
            res = float(np.max(np.abs(bad.Y)))
            ok_bits = True
        else:
            result = gauge_channel(ch)
            res = result.residual_Y
            ok_bits = np.array_equal(ch.X, result.gauged.X) and np.array_equal(
                ch.delta, result.gauged.delta
            )
        worst = max(worst, res / (1.0 + np.max(np.abs(ch.Y))))
        if not ok_bits:
            drift_changed += 1
    passed = worst <= 1e-9 and drift_changed == 0
    return SuiteResult("channel-gauging", passed, worst, 1e-9, n)


def _suite_semigroup_gauging(rng, fault):
    worst = 0.0
    n = 50
    for _ in range(n):
        modes = int(rng.integers(1, 3))
        gen = GaussianGenerator(
            A=random_hurwitz(rng, 2 * modes), D=random_psd(rng, 2 * modes), u=np.zeros(2 * modes)
        )
        times = default_gauge_times(gen.A, count=10)
        worst = max(worst, gauge_semigroup(gen, times).max_residual)
    return SuiteResult("semigroup-gauging", worst <= 1e-8, worst, 1e-8, n)


def _suite_composition(rng, fault):
    worst = 0.0
    n = 100
    for _ in range(n):
        modes = int(rng.integers(1, 4))
        chs = [random_stable_channel(rng, modes) for _ in range(3)]
        left = compose(chs[2], compose(chs[1], chs[0]))
        right = compose(compose(chs[2], chs[1]), chs[0])
        worst = max(
            worst,
            float(np.max(np.abs(left.X - right.X))),
            float(np.max(np.abs(left.Y - right.Y))),
            float(np.max(np.abs(left.delta - right.delta))),
        )
        state = random_state(rng, modes)
        via_compose = apply_channel(compose(chs[1], chs[0]), state)
        via_sequence = apply_channel(chs[1], apply_channel(chs[0], state))
        worst = max(
            worst,
            float(np.max(np.abs(via_compose.d - via_sequence.d))),
            float(np.max(np.abs(via_compose.V - via_sequence.V))),
        )
    return SuiteResult("composition-consistency", worst <= 1e-12, worst, 1e-12, n)


def _suite_one_mode_identities(rng, fault):
    sigma = symplectic_form(1).matrix
    worst_id = 0.0
    disagreements = 0
    n = 1000
    for _ in range(n):
        x = rng.uniform(-2, 2, size=(2, 2))
        worst_id = max(
            worst_id,
            float(np.max(np.abs(x @ sigma @ x.T - np.linalg.det(x) * sigma))),
        )
        y = rng.standard_normal((2, 2))
        y = 0.5 * (y + y.T) + rng.uniform(-0.3, 1.0) * np.eye(2)
        ch = GaussianChannel(X=x, Y=y, delta=np.zeros(2))
        det_rep = cp_check(ch, method=CpMethod.DET_CONDITION)
        herm_rep = cp_check(ch, method=CpMethod.HERMITIAN_EIG)
        if abs(det_rep.margin) < 1e-10 or abs(herm_rep.margin) < 1e-10:
            continue
        if det_rep.passes != herm_rep.passes:
            disagreements += 1
    passed = worst_id <= 1e-13 and disagreements == 0
    return SuiteResult("one-mode-identities", passed, max(worst_id, float(disagreements)), 1e-13, n)


def _suite_noise_independence(rng, fault):
    worst = 0.0
    n = 30
    kept = 0
    while kept < n:
        a = random_hurwitz(rng, 2)
        a = a / float(np.max(np.abs(np.linalg.eigvals(a))))
        _, vecs = np.linalg.eig(a)
        if np.linalg.cond(vecs) > 3.0:
            continue
        gen = GaussianGenerator(
            A=a, D=0.5 * random_psd(rng, 2), u=0.3 * rng.standard_normal(2)
        )
        silent = GaussianGenerator(A=a, D=np.zeros((2, 2)), u=np.zeros(2))
        e_noisy = np.linalg.eigvals(truncated_ou_matrix(gen, 6))
        e_silent = np.linalg.eigvals(truncated_ou_matrix(silent, 6))
        worst = max(worst, eigenvalue_multiset_distance(e_noisy, e_silent))
        kept += 1
    return SuiteResult("noise-independence", worst <= 1e-9, worst, 1e-9, n)


def _suite_jordan_chain(rng, fault):
    bad = 0
    for ell in range(1, 7):
        lam = -0.8
        a = lam * np.eye(2) + np.array([[0.0, 0.0], [1.0, 0.0]])  # A^T = lam I + N
        m = drift_restriction_matrix(a, ell)
        rep = jordan_structure(m, tol=0.2)
        ok = (
            rep.defective
            and len(rep.eigenvalues) == 1
            and abs(rep.eigenvalues[0] - ell * lam) < 1e-8
            and rep.block_sizes[0] == (ell + 1,)
        )
        if not ok:
            bad += 1
    return SuiteResult("jordan-chain", bad == 0, float(bad), 0.0, 6)


def _suite_ep_closed_forms(rng, fault):
    worst = 0.0
    n = 200
    for _ in range(n):
        p = SqueezedReservoirParams(
            kappa=rng.uniform(0.3, 5.0),
            delta=0.0,
            epsilon=rng.uniform(-2.0, 2.0),
            r=rng.uniform(0.0, 1.5),
            phi=rng.uniform(0.0, 2 * math.pi),
        )
        for branch in EpBranch:
            closed = squeezed_ep_gauge(p, branch)
            sign = 1.0 if branch is EpBranch.PLUS else -1.0
            gen = squeezed_generator(
                SqueezedReservoirParams(p.kappa, sign * p.epsilon, p.epsilon, p.r, p.phi)
            )
            direct = solve_lyapunov(gen.A, gen.D).S
            worst = max(worst, float(np.max(np.abs(closed.S - direct))))
    for _ in range(n):
        params = NmFamilyParams(lam=0.0, omega=rng.uniform(0.1, 2.0))
        t = rng.uniform(0.2, 3.0)
        for branch in EpBranch:
            closed = nm_ep_gauge(params, t, branch)
            sign = 1.0 if branch is EpBranch.PLUS else -1.0
            ch = nm_channel(params, t, lam=sign * params.omega, omega=params.omega)
            direct = solve_stein(ch.X, ch.Y).S
            worst = max(worst, float(np.max(np.abs(closed.S - direct))))
    return SuiteResult("ep-closed-forms", worst <= 1e-10, worst, 1e-10, 2 * n)


def _suite_figure_trends(rng, fault):
    notes = []
    ok = True
    worst = 0.0

    def monotone(values, direction):
        diffs = np.diff(np.asarray(values))
        slack = 1e-12 * (1.0 + np.max(np.abs(values)))
        return bool(np.all(direction * diffs >= -slack))

    for branch in ("plus", "minus"):
        cfg = SweepConfig(command="squeezed-gauge")
        table = run_squeezed_gauge(cfg, "kappa", branch)
        if not (monotone(table.column("lambda1"), -1) and monotone(table.column("lambda2"), -1)):
            ok = False
            notes.append(f"kappa trend broken ({branch})")
        table = run_squeezed_gauge(cfg, "r", branch)
        if not (monotone(table.column("lambda1"), +1) and monotone(table.column("lambda2"), +1)):
            ok = False
            notes.append(f"r trend broken ({branch})")
    phi_tables = {
        branch: run_squeezed_gauge(SweepConfig(command="squeezed-gauge"), "phi", branch)
        for branch in ("plus", "minus")
    }
    args = {b: t.column("phi")[np.argmax(t.column("lambda2"))] for b, t in phi_tables.items()}
    step = np.diff(phi_tables["plus"].column("phi"))[0]
    offset = abs(args["plus"] - args["minus"])
    offset = min(offset, 2 * math.pi - offset)
    if abs(offset - math.pi) > 0.5 * step:
        ok = False
        notes.append(f"phi argmax offset {offset:.4f} != pi")

    iso = run_nm_branch(SweepConfig(command="nm-branch", diffusion="iso"))
    plus = np.array(iso.select(branch=1.0))
    minus = np.array(iso.select(branch=-1.0))
    iso_gap = float(np.max(np.abs(plus[:, 2:4] - minus[:, 2:4])))
    worst = max(worst, iso_gap)
    if iso_gap > 1e-12:
        ok = False
        notes.append("isotropic branches differ")

    aligned = run_nm_branch(SweepConfig(command="nm-branch", diffusion="drift-aligned"))
    plus = np.array(aligned.select(branch=1.0))
    minus = np.array(aligned.select(branch=-1.0))
    spectrum_gap = float(np.max(np.abs(plus[:, 2:4] - minus[:, 2:4])))
    worst = max(worst, spectrum_gap)
    if spectrum_gap > 1e-12:
        ok = False
        notes.append("drift-aligned eigenvalue branch symmetry broken")
    qp_flip = np.max(plus[:, 4] * minus[:, 4])
    qp_floor = np.min(np.abs(plus[:, 4]))
    if not (qp_flip < 0 and qp_floor > 1e-6):
        ok = False
        notes.append("drift-aligned orientation sign flip missing")
    return SuiteResult("figure-trends", ok, worst, 1e-12, 6, note="; ".join(notes))


_SUITES = (
    _suite_lyapunov,
    _suite_stein,
    _suite_positivity,
    _suite_jury,
    _suite_expm2,
    _suite_channel_gauging,
    _suite_semigroup_gauging,
    _suite_composition,
    _suite_one_mode_identities,
    _suite_noise_independence,
    _suite_jordan_chain,
    _suite_ep_closed_forms,
    _suite_figure_trends,
)

FAULT_CHOICES = ("stein", "lyapunov", "gauge")


@dataclass(frozen=True)
class VerificationReport:
    seed: int
    fault: str
    suites: tuple
    all_passed: bool

    def as_dict(self):
        return {
            "seed": self.seed,
            "fault": self.fault or "",
            "all_passed": self.all_passed,
            "suites": [asdict(s) for s in self.suites],
        }


def run_verification(seed=0, fault=None):
    """Run every suite with a seeded generator; `fault` sabotages one of them."""
    if fault is not None and fault not in FAULT_CHOICES:
        raise ValueError(f"unknown fault {fault!r}; choose from {FAULT_CHOICES}")
    results = []
    for suite in _SUITES:
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(len(results),)))
        results.append(suite(rng, fault))
    return VerificationReport(
        seed=seed,
        fault=fault,
        suites=tuple(results),
        all_passed=all(r.passed for r in results),
    )
