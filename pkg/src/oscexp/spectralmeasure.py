"""Eigenvalue-side view of the parameter integrals.

Diagonalising A = g^T diag(lambda) g turns the flat volume da on symmetric
matrices into  prod_{l<m} |lambda_m - lambda_l| dlambda  times a volume on
the orthogonal group.  With the Gaussian regularisation of the phase, the
integral of |T_inf|^p over all (A, b) reduces, after the b-marginal, to

    const * int_{R^k} prod_{l<m} |lambda_m - lambda_l| / prod_l (1 + lambda_l^2)^{(p-2)/4} dlambda,

which is finite exactly when p > 2k + 2.  This module evaluates that
integral over growing cubes, checks the pushforward identity by Monte
Carlo, and measures the decay of |T(tA)| against det(I + t^2 A^2).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from .closedform import theta_infinity_integrand
from .fitting import PowerLawFit, decay_fit, stabilization_verdict
from .oscquad import QuadratureBudget, Region, _legendre, t_box
from .rng import stream
from .symlin import PhaseParameters, SymmetricMatrix, det_one_plus_A_sq, jacobi_eigh, packed_size, vandermonde_abs

__all__ = [
    "p0_affine",
    "p0_homogeneous",
    "tail_exponent_analytic",
    "tail_exponent_numeric",
    "ThresholdRow",
    "ThresholdReport",
    "theta_infinity_eigen",
    "threshold_report",
    "WeylReport",
    "DEFAULT_TEST_FUNCTIONS",
    "weyl_pushforward_check",
    "DetDecayReport",
    "det_decay_bound_check",
]


# ---------------------------------------------------------------------------
# thresholds


def _check_k(k: int) -> None:
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")


def p0_affine(k: int) -> float:
    """Critical exponent 2k + 2 for the affine phase (Ax, x) + (b, x)."""
    _check_k(k)
    return 2.0 * k + 2.0


def p0_homogeneous(k: int) -> float:
    """Critical exponent 2k for the homogeneous phase (Ax, x) over the unit cube."""
    _check_k(k)
    return 2.0 * k


def tail_exponent_analytic(k: int, p: float) -> float:
    """Growth exponent of the eigenvalue integrand along one eigenvalue ray.

    (k - 1) - (p - 2) / 2; the integral converges iff this is below -1.
    """
    _check_k(k)
    if p <= 2:
        raise ValueError("p must exceed 2")
    return (k - 1) - (p - 2) / 2.0


def tail_exponent_numeric(k: int, p: float, lambda_rest: Optional[Sequence[float]] = None,
                          t_range=(1e2, 1e6), points: int = 41) -> PowerLawFit:
    """Log-log slope of the integrand along lambda_1 = t, the others held fixed.

    ``lambda_rest`` defaults to (0, 1, ..., k-2).
    """
    _check_k(k)
    if lambda_rest is None:
        lambda_rest = np.arange(k - 1, dtype=float)
    rest = np.asarray(lambda_rest, dtype=float)
    if rest.shape != (k - 1,):
        raise ValueError(f"lambda_rest must have length {k - 1}")
    ts = np.geomspace(t_range[0], t_range[1], points)
    lam = np.column_stack([ts, np.broadcast_to(rest, (points, k - 1))])
    vals = np.atleast_1d(theta_infinity_integrand(lam, p))
    return decay_fit(np.column_stack([ts, vals]))


# ---------------------------------------------------------------------------
# the eigenvalue integral over growing cubes


@dataclass(frozen=True)
class ThresholdRow:
    p: float
    cutoffs: tuple
    values: tuple
    verdict: str
    method: str

    @property
    def increments(self) -> tuple:
        return tuple(np.diff(self.values))


@dataclass
class ThresholdReport:
    k: int
    rows: list = field(default_factory=list)

    @property
    def p_grid(self) -> tuple:
        return tuple(r.p for r in self.rows)

    @property
    def verdicts(self) -> Dict[float, str]:
        return {r.p: r.verdict for r in self.rows}

    @property
    def integral_values(self) -> Dict[float, tuple]:
        return {r.p: r.values for r in self.rows}


def _check_cutoffs(cutoffs) -> np.ndarray:
    r = np.asarray(cutoffs, dtype=float)
    if r.ndim != 1 or r.size < 4:
        raise ValueError("need at least 4 cutoffs")
    if np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise ValueError("cutoffs must be positive and ascending")
    ratios = r[1:] / r[:-1]
    if np.max(np.abs(ratios / ratios[0] - 1)) > 1e-9:
        raise ValueError("cutoffs must form a geometric progression")
    return r


def _breakpoints(cutoffs: np.ndarray) -> np.ndarray:
    """Symmetric breakpoints: 0, powers of two from 1/4 up, and the cutoffs."""
    top = cutoffs[-1]
    pos = {0.25 * 2.0**j for j in range(int(math.log2(4 * top)) + 1) if 0.25 * 2.0**j < top}
    pos |= set(float(c) for c in cutoffs)
    pos = np.array(sorted(pos))
    return np.concatenate([-pos[::-1], [0.0], pos])


def _ordered_rule(m: int, order: int):
    """Nodes and weights on {0 <= v_1 <= ... <= v_m <= 1} from a cube rule."""
    x, w = _legendre(order)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    grids = np.meshgrid(*([x] * m), indexing="ij")
    u = np.stack([g.ravel() for g in grids], axis=-1)
    wt = np.ones(u.shape[0])
    for g in np.meshgrid(*([w] * m), indexing="ij"):
        wt = wt * g.ravel()
    v = np.empty_like(u)
    v[:, m - 1] = u[:, m - 1]
    for j in range(m - 2, -1, -1):
        v[:, j] = v[:, j + 1] * u[:, j]
    jac = np.prod(v[:, 1:], axis=1) if m > 1 else np.ones(u.shape[0])
    return v, wt * jac


def _cell_integral(p: float, intervals, blocks, order: int, rules) -> float:
    """Integral over a product of ordered blocks, each block on one interval."""
    pieces_x, pieces_w = [], []
    for idx, m in blocks:
        lo, hi = intervals[idx]
        v, w = rules[m]
        pieces_x.append(lo + (hi - lo) * v)
        pieces_w.append(w * (hi - lo) ** m)
    # tensor the blocks together
    pts = pieces_x[0]
    wts = pieces_w[0]
    for xb, wb in zip(pieces_x[1:], pieces_w[1:]):
        n1, n2 = pts.shape[0], xb.shape[0]
        pts = np.concatenate([np.repeat(pts, n2, axis=0), np.tile(xb, (n1, 1))], axis=1)
        wts = np.repeat(wts, n2) * np.tile(wb, n1)
    return float(np.dot(wts, theta_infinity_integrand(pts, p)))


def _theta_quadrature(k: int, p: float, cutoffs: np.ndarray, order: int) -> list:
    bp = _breakpoints(cutoffs)
    intervals = list(zip(bp[:-1], bp[1:]))
    reach = [max(abs(lo), abs(hi)) for lo, hi in intervals]
    rules = {m: _ordered_rule(m, order) for m in range(1, k + 1)}
    per_cutoff = [[] for _ in cutoffs]
    # by permutation symmetry integrate over lambda_1 <= ... <= lambda_k and multiply by k!
    for combo in itertools.combinations_with_replacement(range(len(intervals)), k):
        blocks = [(idx, len(list(grp))) for idx, grp in itertools.groupby(combo)]
        val = _cell_integral(p, intervals, blocks, order, rules)
        r = max(reach[i] for i in combo)
        for j, c in enumerate(cutoffs):
            if r <= c * (1 + 1e-12):
                per_cutoff[j].append(val)
    return [math.factorial(k) * math.fsum(v) for v in per_cutoff]


def _theta_monte_carlo(k: int, p: float, cutoffs: np.ndarray, samples: int, seed: int) -> list:
    """Importance sampling with coordinates drawn log-uniformly in 1 + |lambda|."""
    top = cutoffs[-1]
    log_top = math.log1p(top)
    chunk = 1 << 16
    sums = np.zeros(len(cutoffs))
    done = 0
    ci = 0
    while done < samples:
        n = min(chunk, samples - done)
        rng = stream(seed, 7, ci)
        mag = np.expm1(rng.random((n, k)) * log_top)
        lam = np.where(rng.random((n, k)) < 0.5, -mag, mag)
        dens = np.prod(1.0 / (2.0 * log_top * (1.0 + mag)), axis=1)
        ratio = theta_infinity_integrand(lam, p) / dens
        reach = np.max(mag, axis=1)
        for j, c in enumerate(cutoffs):
            sums[j] += math.fsum(ratio[reach <= c])
        done += n
        ci += 1
    return list(sums / samples)


def theta_infinity_eigen(k: int, p: float, cutoffs: Sequence[float], order: int = 12,
                         mc_samples: int = 2_000_000, seed: int = 0) -> ThresholdRow:
    """I(R) = int_{[-R, R]^k} of the eigenvalue integrand for each cutoff R, plus a verdict.

    k <= 3 uses Gauss-Legendre on cells cut at 0, +-2^j/4 and the cutoffs;
    within a cell the coordinates are ordered, which keeps the Vandermonde
    factor polynomial.  k = 4, 5 use importance-sampled Monte Carlo.
    """
    _check_k(k)
    if p <= 2:
        raise ValueError("p must exceed 2")
    r = _check_cutoffs(cutoffs)
    if k <= 3:
        values = _theta_quadrature(k, p, r, order)
        method = "gauss-legendre"
    elif k <= 5:
        values = _theta_monte_carlo(k, p, r, mc_samples, seed)
        method = "monte-carlo"
    else:
        raise ValueError("k must be at most 5")
    return ThresholdRow(float(p), tuple(float(c) for c in r), tuple(values), stabilization_verdict(values), method)


def threshold_report(k: int, p_grid: Sequence[float], cutoffs: Sequence[float], **kwargs) -> ThresholdReport:
    return ThresholdReport(k, [theta_infinity_eigen(k, p, cutoffs, **kwargs) for p in p_grid])


# ---------------------------------------------------------------------------
# pushforward of the Gaussian matrix ensemble


def _f_one(lam):
    return np.ones(lam.shape[0])


def _f_sum_sq(lam):
    return np.sum(lam * lam, axis=1)


def _f_inv_prod(lam):
    return 1.0 / np.prod(1.0 + lam * lam, axis=1)


def _f_cos_trace(lam):
    return np.cos(np.sum(lam, axis=1))


DEFAULT_TEST_FUNCTIONS: Dict[str, Callable] = {
    "one": _f_one,
    "sum_sq": _f_sum_sq,
    "inv_prod": _f_inv_prod,
    "cos_trace": _f_cos_trace,
}


@dataclass(frozen=True)
class WeylReport:
    k: int
    names: tuple
    matrix_side: tuple
    matrix_stderr: tuple
    eigen_side: tuple
    ratios: tuple
    spread: float
    antisymmetric_mean: float
    antisymmetric_stderr: float
    samples: int


def _gaussian_matrix_moments(k: int, funcs, samples: int, seed: int, chunk: int = 1 << 16):
    """Sample means and standard errors of f(eig(A)), A with density ~ exp(-tr A^2 / 2).

    The last accumulator is the antisymmetric probe lambda_1 - lambda_2 with
    the eigenvalues put in a random order.
    """
    nf = len(funcs)
    s1 = np.zeros(nf + 1)
    s2 = np.zeros(nf + 1)
    iu = np.triu_indices(k, 1)
    done = 0
    ci = 0
    while done < samples:
        n = min(chunk, samples - done)
        rng = stream(seed, 11, ci)
        a = np.zeros((n, k, k))
        a[:, np.arange(k), np.arange(k)] = rng.standard_normal((n, k))
        off = rng.standard_normal((n, len(iu[0]))) * math.sqrt(0.5)
        a[:, iu[0], iu[1]] = off
        a[:, iu[1], iu[0]] = off
        lam, _ = jacobi_eigh(a)
        vals = [np.asarray(f(lam), dtype=float) for f in funcs]
        perm = np.argsort(rng.random((n, k)), axis=1)
        shuffled = np.take_along_axis(lam, perm, axis=1)
        vals.append(shuffled[:, 0] - shuffled[:, 1])
        for j, v in enumerate(vals):
            s1[j] += math.fsum(v)
            s2[j] += math.fsum(v * v)
        done += n
        ci += 1
    mean = s1 / samples
    var = np.maximum(s2 / samples - mean**2, 0.0)
    return mean, np.sqrt(var / samples)


def _ordered_gaussian_integral(k: int, f: Callable, half_width: float = 10.0, panels: int = 20,
                               order: int = 10) -> float:
    """int_{R^k} f |V| e^{-|lambda|^2/2} via lambda_1 = t, lambda_{j+1} = lambda_j + s_j, s_j >= 0."""
    x, w = _legendre(order)
    edges_t = np.linspace(-half_width, half_width, panels + 1)
    t_nodes = (0.5 * (edges_t[:-1] + edges_t[1:])[:, None] + 0.5 * np.diff(edges_t)[:, None] * x).ravel()
    t_wts = (0.5 * np.diff(edges_t)[:, None] * w).ravel()
    if k == 1:
        lam = t_nodes[:, None]
        return float(np.dot(t_wts, f(lam) * np.exp(-0.5 * t_nodes**2)))
    edges_s = np.linspace(0.0, 2 * half_width, panels + 1)
    s_nodes = (0.5 * (edges_s[:-1] + edges_s[1:])[:, None] + 0.5 * np.diff(edges_s)[:, None] * x).ravel()
    s_wts = (0.5 * np.diff(edges_s)[:, None] * w).ravel()
    grids = np.meshgrid(*([s_nodes] * (k - 1)), indexing="ij")
    gaps = np.stack([g.ravel() for g in grids], axis=-1)
    gap_w = np.ones(gaps.shape[0])
    for g in np.meshgrid(*([s_wts] * (k - 1)), indexing="ij"):
        gap_w = gap_w * g.ravel()
    offsets = np.concatenate([np.zeros((gaps.shape[0], 1)), np.cumsum(gaps, axis=1)], axis=1)
    total = []
    for t, wt in zip(t_nodes, t_wts):
        lam = t + offsets
        dens = vandermonde_abs(lam) * np.exp(-0.5 * np.sum(lam * lam, axis=1))
        total.append(wt * float(np.dot(gap_w, f(lam) * dens)))
    return math.factorial(k) * math.fsum(total)


def weyl_pushforward_check(k: int, test_functions=None, mc_samples: int = 1_000_000, seed: int = 0) -> WeylReport:
    """Compare matrix-side and eigenvalue-side integrals of symmetric test functions.

    Matrix side: Z * E[f(eig(A))] for the Gaussian ensemble with density
    exp(-tr A^2 / 2) / Z.  Eigenvalue side: int f |V| exp(-|lambda|^2 / 2).
    The ratio is the orthogonal-group volume constant and must not depend
    on f; ``spread`` is (max ratio - min ratio) / mean ratio.
    """
    _check_k(k)
    if k < 2:
        raise ValueError("the pushforward check needs k >= 2")
    if test_functions is None:
        test_functions = DEFAULT_TEST_FUNCTIONS
    if isinstance(test_functions, dict):
        names, funcs = tuple(test_functions), list(test_functions.values())
    else:
        funcs = list(test_functions)
        names = tuple(getattr(f, "__name__", f"f{i}") for i, f in enumerate(funcs))
    if len(funcs) < 3:
        raise ValueError("need at least 3 test functions")
    mean, err = _gaussian_matrix_moments(k, funcs, mc_samples, seed)
    z = (2 * math.pi) ** (k / 2) * math.pi ** (packed_size(k - 1) / 2)
    matrix_side = mean[:-1] * z
    eigen_side = np.array([_ordered_gaussian_integral(k, f) for f in funcs])
    ratios = matrix_side / eigen_side
    spread = float((ratios.max() - ratios.min()) / ratios.mean())
    return WeylReport(k, names, tuple(matrix_side), tuple(err[:-1] * z), tuple(eigen_side), tuple(ratios), spread,
                      float(mean[-1]), float(err[-1]), mc_samples)


# ---------------------------------------------------------------------------
# decay of |T(tA)| against det(I + t^2 A^2)


@dataclass(frozen=True)
class DetDecayReport:
    ts: tuple
    abs_values: tuple
    det_values: tuple
    fit: PowerLawFit
    bound_exponent: float
    passed: bool
    converged: bool


def det_decay_bound_check(A: SymmetricMatrix, q_conj: float, budget: Optional[QuadratureBudget] = None,
                          t_range=(1e2, 1e5), points: int = 13) -> DetDecayReport:
    """Fit |T(tA)| over the unit cube against det(I + t^2 A^2) along a ray.

    The Holder bound predicts |T(A)| <= C det(I + A^2)^{-(1/4 - 1/(2 q'))};
    the check passes when the fitted exponent is at most
    -(1/4 - 1/(2 q')) + 0.05 (faster decay is allowed).
    """
    if q_conj <= 1:
        raise ValueError("q_conj must exceed 1")
    budget = budget or QuadratureBudget(tol=1e-10)
    ts = np.geomspace(t_range[0], t_range[1], points)
    region = Region.unit_cube(A.order)
    vals, dets, ok = [], [], True
    for t in ts:
        res = t_box(PhaseParameters.homogeneous(A.scaled(float(t))), region, budget)
        ok = ok and res.converged
        vals.append(abs(res.value))
        dets.append(det_one_plus_A_sq(A.scaled(float(t))))
    fit = decay_fit(np.column_stack([dets, vals]))
    bound = -(0.25 - 0.5 / q_conj)
    return DetDecayReport(tuple(ts), tuple(vals), tuple(dets), fit, bound, fit.exponent <= bound + 0.05, ok)
