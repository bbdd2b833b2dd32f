"""Numerical evaluation of quadratic-phase oscillatory integrals.

Everything here is quadrature; nothing calls into ``closedform``, so the
two modules can serve as oracles for each other.

The workhorse is ``adaptive_cubature``: a vectorised panel refinement that
first bisects until the phase varies by at most ``2 pi * order / 4`` on a
panel, then compares tensor Gauss-Legendre rules of order n and 2n on each
leaf and keeps refining leaves whose disagreement exceeds their share of
the tolerance.

For boxes with one strongly curved direction (a_jj * width_j^2 >> 1) the
box evaluator integrates that direction exactly with the Faddeeva function
and hands the remaining directions to the panel engine; the integrand left
over is smooth apart from the endpoint oscillations whose phases are known
quadratics, so the panel count no longer scales with a_jj.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import fresnel, roots_hermite, wofz

from .symlin import PhaseParameters, SymmetricMatrix

SQRT_PI = math.sqrt(math.pi)
E_I_PI_4 = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))

# t_infinity(0, 0) / t_gauss_damped(0, 0) for k = 1.  The k-dimensional
# constant is its k-th power; see ``convention_constant``.
CONVENTION_CONSTANT = math.sqrt(2.0)


def convention_constant(k: int) -> float:
    return CONVENTION_CONSTANT ** k


@dataclass(frozen=True)
class QuadratureBudget:
    tol: float = 1e-10
    max_evals: int = 10**8
    base_order: int = 12

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.base_order < 4:
            raise ValueError("base_order must be at least 4")
        if self.max_evals < 1:
            raise ValueError("max_evals must be positive")

    @classmethod
    def default_for(cls, k: int, tol: float = 1e-10) -> "QuadratureBudget":
        return cls(tol=tol, max_evals=10**9 if k >= 3 else 10**8)


@dataclass
class IntegralResult:
    value: complex
    err_abs: float
    n_evals: int
    method: str
    converged: bool

    @property
    def modulus(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class Region:
    """Integration region: the unit cube, an axis-parallel box, or a union of simplices."""

    kind: str
    lower: Optional[tuple] = None
    upper: Optional[tuple] = None
    simplices: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind in ("unit_cube", "box"):
            lo = np.asarray(self.lower, dtype=float)
            hi = np.asarray(self.upper, dtype=float)
            if lo.shape != hi.shape or lo.ndim != 1:
                raise ValueError("box corners must be vectors of equal length")
            if not np.all(lo < hi):
                raise ValueError("box requires lower < upper componentwise")
        elif self.kind == "simplex_union":
            if not self.simplices:
                raise ValueError("simplex_union needs at least one simplex")
            for s in self.simplices:
                _check_simplex(np.asarray(s, dtype=float))
        else:
            raise ValueError(f"unknown region kind {self.kind!r}")

    @classmethod
    def unit_cube(cls, k: int) -> "Region":
        return cls("unit_cube", (0.0,) * k, (1.0,) * k)

    @classmethod
    def box(cls, lower: Sequence[float], upper: Sequence[float]) -> "Region":
        return cls("box", tuple(map(float, lower)), tuple(map(float, upper)))

    @classmethod
    def simplex_union(cls, simplices) -> "Region":
        return cls("simplex_union", simplices=tuple(tuple(map(tuple, np.asarray(s, float))) for s in simplices))

    @property
    def dim(self) -> int:
        if self.kind == "simplex_union":
            return len(self.simplices[0][0])
        return len(self.lower)

    def volume(self) -> float:
        if self.kind == "simplex_union":
            return float(sum(_simplex_volume(np.asarray(s)) for s in self.simplices))
        return float(np.prod(np.subtract(self.upper, self.lower)))


def _simplex_volume(s: np.ndarray) -> float:
    k = s.shape[1]
    return abs(np.linalg.det(s[1:] - s[0])) / math.factorial(k)


def _check_simplex(s: np.ndarray) -> None:
    if s.ndim != 2 or s.shape[0] != s.shape[1] + 1:
        raise ValueError("a simplex in R^k needs k+1 vertices")
    edges = s[1:] - s[0]
    scale = np.max(np.linalg.norm(edges, axis=1))
    if not scale > 0 or abs(np.linalg.det(edges)) <= 1e-12 * scale ** s.shape[1]:
        raise ValueError("degenerate simplex")


def cube_simplices(k: int):
    """The k! simplices {x_{s(1)} >= ... >= x_{s(k)}} tiling the unit cube."""
    import itertools

    out = []
    for perm in itertools.permutations(range(k)):
        verts = [np.zeros(k)]
        cur = np.zeros(k)
        for axis in perm:
            cur = cur.copy()
            cur[axis] = 1.0
            verts.append(cur)
        out.append(np.array(verts))
    return out


# ----------------------------------------------------------------------------
# tensor Gauss rules

@lru_cache(maxsize=None)
def _legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=None)
def _tensor_legendre(n: int, d: int):
    x, w = _legendre(n)
    grids = np.meshgrid(*([x] * d), indexing="ij")
    wgrids = np.meshgrid(*([w] * d), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return nodes, weights


def _panel_rule(f, lo, hi, n):
    """Tensor Gauss-Legendre of order n on each panel; lo, hi have shape (P, d)."""
    d = lo.shape[1]
    nodes, weights = _tensor_legendre(n, d)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = mid[:, None, :] + half[:, None, :] * nodes[None, :, :]
    vals = f(pts.reshape(-1, d)).reshape(lo.shape[0], -1)
    return (vals @ weights) * np.prod(half, axis=1), pts.shape[0] * pts.shape[1]


def quadratic_variation(a: np.ndarray, b: np.ndarray):
    """Per-axis bound on the range of (Ax,x) + (b,x) over each panel."""
    absa = np.abs(a)

    def variation(lo, hi):
        c = 0.5 * (lo + hi)
        r = 0.5 * (hi - lo)
        g = 2.0 * c @ a + b
        return 2.0 * r * (np.abs(g) + r @ absa)

    return variation


def sampled_variation(phase: Callable, samples: int = 5):
    """Per-axis phase range estimated on a small grid including panel corners."""
    t = np.linspace(-1.0, 1.0, samples)

    def variation(lo, hi):
        p_count, d = lo.shape
        grids = np.meshgrid(*([t] * d), indexing="ij")
        ref = np.stack([g.ravel() for g in grids], axis=-1)
        pts = 0.5 * (lo + hi)[:, None, :] + 0.5 * (hi - lo)[:, None, :] * ref[None]
        ph = phase(pts.reshape(-1, d)).reshape((p_count,) + (samples,) * d)
        out = np.empty((p_count, d))
        for j in range(d):
            rng = np.ptp(ph, axis=j + 1)
            out[:, j] = rng.reshape(p_count, -1).max(axis=1)
        # grid sampling underestimates the range between nodes
        return 1.25 * out

    return variation


def adaptive_cubature(
    f: Callable,
    lo,
    hi,
    variation: Callable,
    budget: QuadratureBudget,
    amp_bound: Optional[Callable] = None,
    method: str = "panel",
) -> IntegralResult:
    """Adaptive tensor Gauss-Legendre cubature of a complex integrand over a box.

    ``f`` maps an (m, d) array of points to m complex values.  ``variation``
    maps panel corners (P, d), (P, d) to per-axis phase-range bounds (P, d).
    ``amp_bound`` (optional) bounds |f| on each panel; panels whose bound
    times volume is negligible are dropped and charged to the error.
    Accepted panels are summed in a fixed order so the result is
    reproducible bit for bit.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = lo.size
    n = budget.base_order
    threshold = 2.0 * math.pi * n / 4.0
    widths0 = hi - lo
    vol_total = float(np.prod(widths0))
    tol = budget.tol
    per_panel_cost = n**d + (2 * n) ** d
    chunk = max(1, 400_000 // per_panel_cost)

    pend_lo = lo[None, :].copy()
    pend_hi = hi[None, :].copy()
    acc_vals: list = []
    acc_errs: list = []
    n_evals = 0
    converged = True

    def split(plo, phi, var):
        rel = (phi - plo) / widths0
        score = var + 1e-3 * threshold * rel
        axis = np.argmax(score, axis=1)
        rows = np.arange(plo.shape[0])
        mid = 0.5 * (plo[rows, axis] + phi[rows, axis])
        lo_a, hi_a = plo.copy(), phi.copy()
        lo_b, hi_b = plo.copy(), phi.copy()
        hi_a[rows, axis] = mid
        lo_b[rows, axis] = mid
        # interleave children so ordering is a function of the tree only
        new_lo = np.stack([lo_a, lo_b], axis=1).reshape(-1, d)
        new_hi = np.stack([hi_a, hi_b], axis=1).reshape(-1, d)
        return new_lo, new_hi

    while pend_lo.shape[0]:
        vol = np.prod(pend_hi - pend_lo, axis=1)
        share = tol * vol / vol_total
        keep = np.ones(pend_lo.shape[0], dtype=bool)
        if amp_bound is not None:
            bound = amp_bound(pend_lo, pend_hi) * vol
            drop = bound <= 0.1 * share
            if np.any(drop):
                acc_vals.append(np.zeros(int(drop.sum()), dtype=complex))
                acc_errs.append(bound[drop])
                keep = ~drop
        plo, phi, vol, share = pend_lo[keep], pend_hi[keep], vol[keep], share[keep]
        if plo.shape[0] == 0:
            break
        var = variation(plo, phi)
        tiny = np.all((phi - plo) <= 1e-12 * widths0, axis=1)
        too_wide = (var.sum(axis=1) > threshold) & ~tiny
        ev = ~too_wide
        m = int(ev.sum())
        if n_evals + m * per_panel_cost > budget.max_evals:
            converged = False
            # out of budget: every remaining panel is evaluated once at order n
            q, cnt = _chunked(f, plo, phi, n, chunk * 4)
            n_evals += cnt
            acc_vals.append(q)
            acc_errs.append(np.abs(q) + vol * _sup_estimate(f, plo, phi, n))
            break
        next_lo = [np.empty((0, d))]
        next_hi = [np.empty((0, d))]
        if m:
            elo, ehi = plo[ev], phi[ev]
            q1, c1 = _chunked(f, elo, ehi, n, chunk)
            q2, c2 = _chunked(f, elo, ehi, 2 * n, chunk)
            n_evals += c1 + c2
            err = np.abs(q2 - q1)
            ok = (err <= share[ev]) | tiny[ev]
            acc_vals.append(q2[ok])
            acc_errs.append(err[ok])
            if np.any(~ok):
                a, b = split(elo[~ok], ehi[~ok], var[ev][~ok])
                next_lo.append(a)
                next_hi.append(b)
        if np.any(too_wide):
            a, b = split(plo[too_wide], phi[too_wide], var[too_wide])
            next_lo.append(a)
            next_hi.append(b)
        pend_lo = np.concatenate(next_lo)
        pend_hi = np.concatenate(next_hi)

    vals = np.concatenate(acc_vals) if acc_vals else np.zeros(0, dtype=complex)
    errs = np.concatenate(acc_errs) if acc_errs else np.zeros(0)
    value = complex(math.fsum(vals.real), math.fsum(vals.imag))
    err_abs = float(math.fsum(errs))
    converged = converged and err_abs <= tol
    return IntegralResult(value, err_abs, n_evals, method, converged)


def _chunked(f, lo, hi, n, chunk):
    out = []
    count = 0
    for s in range(0, lo.shape[0], chunk):
        q, c = _panel_rule(f, lo[s : s + chunk], hi[s : s + chunk], n)
        out.append(q)
        count += c
    return np.concatenate(out) if out else np.zeros(0, dtype=complex), count


def _sup_estimate(f, lo, hi, n):
    d = lo.shape[1]
    nodes, _ = _tensor_legendre(n, d)
    pts = 0.5 * (lo + hi)[:, None, :] + 0.5 * (hi - lo)[:, None, :] * nodes[None]
    return np.abs(f(pts.reshape(-1, d))).reshape(lo.shape[0], -1).max(axis=1)


# ----------------------------------------------------------------------------
# exact one-dimensional chirp segments


def _fresnel_tail_factor(v):
    """K(v) with int_v^inf exp(i t^2) dt = exp(i v^2) K(v), for v >= 0."""
    return 0.5 * SQRT_PI * E_I_PI_4 * wofz(E_I_PI_4 * v)


# below these the chirp phase changes by at most ~40 over the segment and a
# fixed Gauss-Legendre rule is exact to rounding
_CHIRP_FLAT = 1e-2
_CHIRP_FLAT_BETA = 40.0
_CHIRP_FLAT_ORDER = 48


def chirp_segment(a: float, beta, lo: float, hi: float):
    """int_lo^hi exp(i (a x^2 + beta x)) dx, vectorised over ``beta``.

    Stable for every a != 0: the Fresnel integrals are written through the
    Faddeeva function so that only the endpoint phases a x^2 + beta x and,
    when the stationary point lies inside, a x_c^2 are ever exponentiated.
    """
    beta = np.asarray(beta, dtype=float)
    if a == 0.0:
        return _linear_segment(beta, lo, hi)
    if a < 0:
        return np.conj(chirp_segment(-a, -beta, lo, hi))
    w = hi - lo
    if a * max(lo * lo, hi * hi) <= _CHIRP_FLAT and np.all(np.abs(beta) * w <= _CHIRP_FLAT_BETA):
        # nearly linear phase: the Faddeeva form would cancel two terms of size 1/sqrt(a)
        x, wt = _legendre(_CHIRP_FLAT_ORDER)
        x = lo + 0.5 * w * (x + 1.0)
        ph = a * x * x + beta[..., None] * x
        return 0.5 * w * np.sum(wt * np.exp(1j * ph), axis=-1)
    sa = math.sqrt(a)
    shift = beta / (2.0 * sa)
    u1 = sa * lo + shift
    u2 = sa * hi + shift
    p1 = (a * lo + beta) * lo
    p2 = (a * hi + beta) * hi
    s1 = np.where(u1 >= 0, 1.0, -1.0)
    s2 = np.where(u2 >= 0, 1.0, -1.0)
    val = s1 * np.exp(1j * p1) * _fresnel_tail_factor(np.abs(u1)) - s2 * np.exp(1j * p2) * _fresnel_tail_factor(np.abs(u2))
    inside = (u1 < 0) & (u2 >= 0)
    if np.any(inside):
        xc = -beta / (2.0 * a)
        val = val + np.where(inside, SQRT_PI * E_I_PI_4 * np.exp(-1j * a * xc * xc), 0.0)
    return val / sa


def _linear_segment(beta, lo, hi):
    w = hi - lo
    z = beta * w
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    phi = np.where(small, 1 + 0.5j * z - z * z / 6.0 - 1j * z**3 / 24.0, (np.exp(1j * zs) - 1.0) / (1j * zs))
    return w * np.exp(1j * beta * lo) * phi


# ----------------------------------------------------------------------------
# boxes


def _phase_fn(a: np.ndarray, b: np.ndarray, const: float = 0.0):
    def phase(x):
        return np.einsum("...i,ij,...j->...", x, a, x) + x @ b + const

    return phase


def _box_corners(region: Region):
    if region.kind not in ("unit_cube", "box"):
        raise ValueError("t_box needs a box region")
    return np.asarray(region.lower, float), np.asarray(region.upper, float)


def _panel_estimate(a, b, lo, hi, n):
    d = lo.size
    var = quadratic_variation(a, b)(lo[None], hi[None])[0]
    thr = 2 * math.pi * n / 4.0
    panels = np.prod(np.maximum(1.0, var * d / thr))
    return float(panels) * (n**d + (2 * n) ** d)


def t_box(
    params: PhaseParameters,
    region: Region,
    budget: QuadratureBudget = QuadratureBudget(),
    method: str = "auto",
) -> IntegralResult:
    """int over a box of exp(i((Ax,x) + (b,x))).

    ``method`` is "panel" (pure adaptive tensor Gauss-Legendre), "fresnel"
    (one axis integrated exactly, the rest by panels) or "auto", which picks
    the panel engine whenever its predicted cost is modest.
    """
    lo, hi = _box_corners(region)
    if lo.size != params.k:
        raise ValueError("region dimension does not match the phase")
    a = params.A.to_dense()
    b = params.b_array
    w = hi - lo
    curv = np.abs(np.diag(a)) * w * w
    if method == "auto":
        cheap = _panel_estimate(a, b, lo, hi, budget.base_order) <= 2e5
        method = "panel" if cheap or curv.max() < 1.0 else "fresnel"
    if method == "panel":
        res = adaptive_cubature(
            lambda x: np.exp(1j * _phase_fn(a, b)(x)), lo, hi, quadratic_variation(a, b), budget, method="panel"
        )
    elif method == "fresnel":
        res = _t_box_fresnel(a, b, lo, hi, budget, int(np.argmax(curv)))
    else:
        raise ValueError(f"unknown method {method!r}")
    assert abs(res.value) <= region.volume() * (1 + 1e-9) + res.err_abs, "modulus bound violated"
    return res


def _t_box_fresnel(a, b, lo, hi, budget, j) -> IntegralResult:
    d = lo.size
    ajj = a[j, j]
    if ajj == 0.0:
        raise ValueError("the exact axis needs a nonzero diagonal coefficient")
    rest = [m for m in range(d) if m != j]
    if not rest:
        val = complex(chirp_segment(ajj, b[j], lo[j], hi[j]))
        return IntegralResult(val, 1e-14 * (hi[j] - lo[j]), 1, "fresnel", True)
    ar = a[np.ix_(rest, rest)]
    br = b[rest]
    aj = a[j, rest]
    bj = b[j]
    lj, hj = lo[j], hi[j]

    def integrand(x):
        beta = bj + 2.0 * x @ aj
        outer = np.einsum("ni,ij,nj->n", x, ar, x) + x @ br
        return np.exp(1j * outer) * chirp_segment(ajj, beta, lj, hj)

    end_lo = quadratic_variation(ar, br + 2.0 * lj * aj)
    end_hi = quadratic_variation(ar, br + 2.0 * hj * aj)
    stat = quadratic_variation(ar - np.outer(aj, aj) / ajj, br - bj * aj / ajj)

    def variation(plo, phi):
        v = np.maximum(end_lo(plo, phi), end_hi(plo, phi))
        c = 0.5 * (plo + phi)
        r = 0.5 * (phi - plo)
        xc = -(bj + 2.0 * c @ aj) / (2.0 * ajj)
        spread = np.abs(r) @ np.abs(aj) / abs(ajj)
        hit = (xc + spread >= lj) & (xc - spread <= hj)
        if np.any(hit):
            v[hit] = np.maximum(v[hit], stat(plo[hit], phi[hit]))
        return v

    res = adaptive_cubature(integrand, lo[rest], hi[rest], variation, budget, method="fresnel")
    return res


def t_polytope(
    params: PhaseParameters, region: Region, budget: QuadratureBudget = QuadratureBudget()
) -> IntegralResult:
    """Sum over simplices, each pulled back to the unit cube by the Duffy map."""
    if region.kind != "simplex_union":
        raise ValueError("t_polytope needs a simplex_union region")
    k = params.k
    if region.dim != k:
        raise ValueError("region dimension does not match the phase")
    a = params.A.to_dense()
    b = params.b_array
    total = 0j
    err = 0.0
    evals = 0
    ok = True
    share = budget.tol / len(region.simplices)
    sub_budget = QuadratureBudget(share, budget.max_evals, budget.base_order)
    for s in region.simplices:
        r = _simplex_integral(a, b, np.asarray(s, float), sub_budget)
        total += r.value
        err += r.err_abs
        evals += r.n_evals
        ok = ok and r.converged
    return IntegralResult(total, err, evals, "duffy", ok)


def _duffy_map(k: int):
    # ordered simplex 1 >= z1 >= ... >= zk >= 0 from the cube, then to the
    # standard simplex through the unit-Jacobian differences y_j = z_j - z_{j+1}
    def mapping(u):
        z = np.cumprod(u, axis=-1)
        y = z.copy()
        y[..., :-1] -= z[..., 1:]
        powers = np.arange(k - 1, -1, -1)
        jac = np.prod(u ** powers, axis=-1)
        return y, jac

    return mapping


def _simplex_integral(a, b, s, budget) -> IntegralResult:
    k = s.shape[1]
    v0 = s[0]
    e = (s[1:] - s[0]).T
    det = abs(np.linalg.det(e))
    mapping = _duffy_map(k)

    def phase(u):
        y, _ = mapping(u)
        x = v0 + y @ e.T
        return np.einsum("ni,ij,nj->n", x, a, x) + x @ b

    def integrand(u):
        y, jac = mapping(u)
        x = v0 + y @ e.T
        return det * jac * np.exp(1j * (np.einsum("ni,ij,nj->n", x, a, x) + x @ b))

    return adaptive_cubature(integrand, np.zeros(k), np.ones(k), sampled_variation(phase), budget, method="duffy")


# ----------------------------------------------------------------------------
# Gaussian-damped full-space integral


@lru_cache(maxsize=None)
def _hermite(n: int):
    x, w = roots_hermite(n)
    return x, w


def t_gauss_damped_hermite(params: PhaseParameters, order: int) -> complex:
    """Tensor Gauss-Hermite rule for int exp(iP(x) - |x|^2) dx."""
    if order < 20:
        raise ValueError("order must be at least 20")
    k = params.k
    x, w = _hermite(order)
    a = params.A.to_dense()
    b = params.b_array
    grids = np.meshgrid(*([x] * k), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wts = np.ones(pts.shape[0])
    for g in np.meshgrid(*([w] * k), indexing="ij"):
        wts = wts * g.ravel()
    total = 0j
    step = 1_000_000
    for s in range(0, pts.shape[0], step):
        p = pts[s : s + step]
        total += np.sum(wts[s : s + step] * np.exp(1j * (np.einsum("ni,ij,nj->n", p, a, p) + p @ b)))
    return complex(total)


DAMPED_HALF_WIDTH = 6.5


def t_gauss_damped_adaptive(params: PhaseParameters, budget: QuadratureBudget = QuadratureBudget(tol=1e-12)) -> IntegralResult:
    """int exp(iP(x) - |x|^2) dx by adaptive panels on a truncated cube.

    For k >= 3 the first coordinate is integrated exactly over the line (a
    one-dimensional complex Gaussian), leaving a (k-1)-dimensional smooth
    Gaussian-damped integrand for the panel engine.
    """
    k = params.k
    a = params.A.to_dense()
    b = params.b_array
    L = DAMPED_HALF_WIDTH

    def gauss_bound(plo, phi):
        nearest = np.clip(0.0, plo, phi)
        return np.exp(-np.sum(nearest * nearest, axis=1))

    if k <= 2:
        def integrand(x):
            return np.exp(1j * (np.einsum("ni,ij,nj->n", x, a, x) + x @ b) - np.sum(x * x, axis=1))

        return adaptive_cubature(
            integrand, -L * np.ones(k), L * np.ones(k), quadratic_variation(a, b), budget,
            amp_bound=gauss_bound, method="damped_panel",
        )

    a00 = a[0, 0]
    a0 = a[0, 1:]
    ar = a[1:, 1:]
    br = b[1:]
    alpha = 1.0 - 1j * a00
    pref = np.sqrt(math.pi / alpha)

    def integrand(x):
        beta = b[0] + 2.0 * x @ a0
        outer = np.einsum("ni,ij,nj->n", x, ar, x) + x @ br
        return pref * np.exp(1j * outer - np.sum(x * x, axis=1) - beta * beta / (4.0 * alpha))

    # phase of the reduced integrand: outer - Im(beta^2 / (4 alpha))
    shrink = a00 / (4.0 * (1.0 + a00 * a00))
    red_a = ar - 4.0 * shrink * np.outer(a0, a0)
    red_b = br - 4.0 * shrink * b[0] * a0
    bound = lambda plo, phi: abs(pref) * gauss_bound(plo, phi)
    return adaptive_cubature(
        integrand, -L * np.ones(k - 1), L * np.ones(k - 1), quadratic_variation(red_a, red_b), budget,
        amp_bound=bound, method="damped_semianalytic",
    )


def t_gauss_damped(params: PhaseParameters, order: int = 60, method: str = "auto") -> complex:
    """int_{R^k} exp(iP(x, A, b) - |x|^2) dx.

    "hermite" applies the tensor Gauss-Hermite rule of the given order.
    "auto" accepts the Hermite value only when doubling the order changes it
    by at most 1e-11 relative, and otherwise falls back to the adaptive
    panel evaluation, since Hermite rules lose their fast convergence once
    the eigenvalues of A are of order one or larger.
    """
    if method == "hermite":
        return t_gauss_damped_hermite(params, order)
    if method == "adaptive":
        return t_gauss_damped_adaptive(params).value
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    k = params.k
    if (2 * order) ** k <= 4_000_000:
        v1 = t_gauss_damped_hermite(params, order)
        v2 = t_gauss_damped_hermite(params, 2 * order)
        if abs(v2 - v1) <= 1e-11 * abs(v2):
            return v2
    return t_gauss_damped_adaptive(params).value


# ----------------------------------------------------------------------------
# Fresnel cosine segments


_FRESNEL_CROSSOVER = 8.0


@lru_cache(maxsize=1)
def _cos_panels():
    # breakpoints at equal increments of y^2 so every panel spans a quarter turn
    n_break = int(math.ceil(_FRESNEL_CROSSOVER**2 / (math.pi / 2)))
    edges = np.sqrt(np.linspace(0.0, _FRESNEL_CROSSOVER**2, n_break + 1))
    x, w = _legendre(20)
    mids = 0.5 * (edges[1:] + edges[:-1])
    halves = 0.5 * (edges[1:] - edges[:-1])
    pts = mids[:, None] + halves[:, None] * x[None]
    vals = (np.cos(pts * pts) * w[None]).sum(axis=1) * halves
    cum = np.concatenate([[0.0], np.cumsum(vals)])
    return edges, cum


def _cos_integral_small(u: float) -> float:
    """int_0^u cos(y^2) dy for 0 <= u <= 8 by Gauss panels."""
    edges, cum = _cos_panels()
    i = int(np.searchsorted(edges, u, side="right") - 1)
    i = min(max(i, 0), len(edges) - 2)
    lo = edges[i]
    x, w = _legendre(20)
    h = 0.5 * (u - lo)
    part = h * float(np.sum(w * np.cos((lo + h * (x + 1)) ** 2)))
    return float(cum[i] + part)


def _exp_tail_asymptotic(y: float) -> complex:
    """int_y^inf exp(i t^2) dt for y >= 8 from its asymptotic series."""
    c = 0.5j
    total = c / y
    y2 = y * y
    power = y
    n = 1
    while True:
        c = c * (2 * n - 1) / 2j
        power *= y2
        term = c / power
        total += term
        if abs(term) < 1e-18 or n > 40:
            break
        n += 1
    return complex(np.exp(1j * y2) * total)


def _cos_integral(u: float) -> float:
    """int_0^u cos(y^2) dy for any real u (odd in u)."""
    s = 1.0 if u >= 0 else -1.0
    u = abs(u)
    if u <= _FRESNEL_CROSSOVER:
        return s * _cos_integral_small(u)
    base = _cos_integral_small(_FRESNEL_CROSSOVER)
    extra = (_exp_tail_asymptotic(_FRESNEL_CROSSOVER) - _exp_tail_asymptotic(u)).real
    return s * (base + extra)


def fresnel_cos_segment(u1: float, u2: float) -> float:
    """int_{u1}^{u2} cos(y^2) dy."""
    if u1 > u2:
        raise ValueError("need u1 <= u2")
    return _cos_integral(u2) - _cos_integral(u1)


def _cos_integral_vec(u):
    """int_0^u cos(y^2) dy, vectorised through scipy's Fresnel integrals."""
    u = np.asarray(u, dtype=float)
    _, c = fresnel(np.abs(u) * math.sqrt(2.0 / math.pi))
    return np.sign(u) * math.sqrt(math.pi / 2.0) * c


# dense scans take this many samples per oscillation period
_SCAN_PER_PERIOD = 32
_SCAN_MAX_POINTS = 50_000_000


def fresnel_floor_constant(delta1: float, delta2: float, lambda0: float, points: int = 200) -> float:
    """inf over lambda >= lambda0 of |int_{d1 sqrt(l)}^{d2 sqrt(l)} cos y^2 dy|.

    The segment tends to sqrt(pi/2), and the tail bound
    |int_u^inf cos y^2 dy| <= 1/u keeps it above
    sqrt(pi/2) - (1/|d1| + 1/d2) / sqrt(lambda).  A log grid of ``points``
    values over [lambda0, 1e6 lambda0] seeds the running minimum; below the
    lambda where that bound clears the minimum, the segment is scanned at
    ``_SCAN_PER_PERIOD`` samples per oscillation period and the best sample
    is polished with a bounded scalar minimisation.  The result is therefore
    the infimum itself, not a grid value, and does not depend on ``points``.
    """
    if not (delta1 < 0 and delta2 > 0.5):
        raise ValueError("need delta1 < 0 and delta2 > 1/2")
    if not lambda0 > 0:
        raise ValueError("lambda0 must be positive")

    def seg(lam):
        r = np.sqrt(lam)
        return np.abs(_cos_integral_vec(delta2 * r) - _cos_integral_vec(delta1 * r))

    limit = math.sqrt(math.pi / 2.0)
    tail = 1.0 / abs(delta1) + 1.0 / delta2
    seeds = np.geomspace(lambda0, 1e6 * lambda0, points)
    vals = seg(seeds)
    best, best_lam = float(vals.min()), float(seeds[vals.argmin()])
    step = 2.0 * math.pi / max(delta1 * delta1, delta2 * delta2) / _SCAN_PER_PERIOD
    upper = (tail / (limit - best)) ** 2 if best < limit else 1e6 * lambda0
    if (upper - lambda0) / step > _SCAN_MAX_POINTS:
        raise ValueError(f"the scan would need {(upper - lambda0) / step:.3g} samples: the segment oscillates "
                         "too fast over the range where it can still reach its minimum")
    start = lambda0
    while start < upper:
        lam = start + step * np.arange(1_000_000)
        lam = lam[lam <= upper]
        v = seg(lam)
        i = int(v.argmin())
        if v[i] < best:
            best, best_lam = float(v[i]), float(lam[i])
        start = float(lam[-1]) + step
    lo, hi = max(lambda0, best_lam - step), best_lam + step
    res = minimize_scalar(lambda l: float(seg(l)), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12 * hi})
    lam_star = float(res.x) if res.fun < best else best_lam
    return abs(fresnel_cos_segment(delta1 * math.sqrt(lam_star), delta2 * math.sqrt(lam_star)))
