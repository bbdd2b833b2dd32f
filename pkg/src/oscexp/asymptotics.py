"""Lower-bound regions, stationary-phase coefficients and tail scaling.

The regions Omega(a11) (affine phase) and Omega+(a11) (homogeneous phase)
are slabs of parameter space, at fixed a11, on which the phase oscillates
essentially only along x1 and its critical point in x1 sits inside the unit
interval.  In the coordinates

    xi_1l = a_1l,          xi^1 = b_1,
    xi_lj = a_lj - a_1l a_1j / a11,
    xi^l  = b_l - kappa b_1 a_1l / a11,      2 <= l <= j <= k,

the regions are products of an l1-ball, an interval and boxes, and the map
to (A, b) has unit Jacobian, so uniform sampling and exact volumes are easy.
With kappa = 1 the constraints bound exactly the coefficients of the phase
left over after completing the square in x1.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import fresnel

from .fitting import PowerLawFit, decay_fit, stabilization_verdict
from .oscquad import QuadratureBudget, Region, _legendre, chirp_segment, t_box
from .rng import stream
from .symlin import PhaseParameters, SymmetricMatrix

__all__ = [
    "OmegaSpec",
    "PowerLawFit",
    "decay_fit",
    "omega_sample",
    "omega_measure_exact",
    "omega_measure_mc",
    "omega_membership",
    "reduced_phase",
    "reduced_params",
    "stationary_leading_coeff",
    "theta_tail_estimate",
    "theta_tail_scan",
    "stationary_decay_table",
    "fresnel_segment_floor",
    "expected_tail_exponent",
    "homogeneous_t_1d",
    "homogeneous_theta_1d",
]

MODES = ("affine", "homogeneous")


@dataclass(frozen=True)
class OmegaSpec:
    k: int
    a11: float
    c1: float = 0.05
    c2: float = 0.05
    mode: str = "affine"
    kappa: float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not self.a11 > 0:
            raise ValueError("a11 must be positive")
        if not (0 < self.c1 <= 0.05 and 0 < self.c2 <= 0.05):
            raise ValueError("c1 and c2 must lie in (0, 0.05]")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    def at(self, a11: float) -> "OmegaSpec":
        return OmegaSpec(self.k, a11, self.c1, self.c2, self.mode, self.kappa)

    @property
    def affine(self) -> bool:
        return self.mode == "affine"


# ---------------------------------------------------------------------------
# coordinates


def _pairs(k):
    return [(l, j) for l in range(1, k) for j in range(l, k)]


def _sample_xi(spec: OmegaSpec, rng: np.random.Generator, n: int) -> dict:
    k, a11 = spec.k, spec.a11
    d = k - 1
    out = {}
    if d:
        # uniform on the solid simplex via normalised exponential spacings
        e = rng.exponential(size=(n, d + 1))
        y = e[:, :d] / e.sum(axis=1, keepdims=True)
        if spec.affine:
            signs = np.where(rng.random((n, d)) < 0.5, -1.0, 1.0)
        else:
            signs = -np.ones((n, d))
        out["a1"] = spec.c1 * a11 * y * signs
        out["xi_a"] = rng.uniform(-spec.c2, spec.c2, size=(n, len(_pairs(k))))
    if spec.affine:
        out["b1"] = rng.uniform(-0.5 * a11, -0.25 * a11, size=n)
        if d:
            out["xi_b"] = rng.uniform(-spec.c2, spec.c2, size=(n, d))
    return out


def _xi_to_arrays(spec: OmegaSpec, xi: dict, n: int):
    """Dense A (n, k, k) and b (n, k) from xi-coordinates."""
    k, a11 = spec.k, spec.a11
    A = np.zeros((n, k, k))
    b = np.zeros((n, k))
    A[:, 0, 0] = a11
    if k > 1:
        a1 = xi["a1"]
        A[:, 0, 1:] = a1
        A[:, 1:, 0] = a1
        for idx, (l, j) in enumerate(_pairs(k)):
            val = xi["xi_a"][:, idx] + a1[:, l - 1] * a1[:, j - 1] / a11
            A[:, l, j] = val
            A[:, j, l] = val
    if spec.affine:
        b[:, 0] = xi["b1"]
        if k > 1:
            b[:, 1:] = xi["xi_b"] + spec.kappa * xi["b1"][:, None] * xi["a1"] / a11
    return A, b


def _membership_arrays(spec: OmegaSpec, A: np.ndarray, b: np.ndarray) -> np.ndarray:
    k = spec.k
    a11 = A[:, 0, 0]
    ok = (a11 > 0) & (np.abs(a11 - spec.a11) <= 1e-12 * spec.a11)
    safe = np.where(a11 > 0, a11, 1.0)
    if k > 1:
        a1 = A[:, 0, 1:]
        ok &= np.sum(np.abs(a1), axis=1) < spec.c1 * a11
        if not spec.affine:
            ok &= np.all(a1 < 0, axis=1)
        for l, j in _pairs(k):
            ok &= np.abs(A[:, l, j] - a1[:, l - 1] * a1[:, j - 1] / safe) <= spec.c2
    if spec.affine:
        r = b[:, 0] / safe
        ok &= (-0.5 < r) & (r < -0.25)
        if k > 1:
            red = b[:, 1:] - spec.kappa * b[:, :1] * A[:, 0, 1:] / safe[:, None]
            ok &= np.all(np.abs(red) <= spec.c2, axis=1)
    else:
        ok &= np.all(b == 0, axis=1)
    return ok


def _to_params(A: np.ndarray, b: np.ndarray) -> list:
    return [PhaseParameters.from_dense(A[i], b[i]) for i in range(A.shape[0])]


def omega_sample(spec: OmegaSpec, count: int, seed: int, slice_index: int = 0) -> list:
    """``count`` parameter pairs drawn uniformly from the region.

    Sample i uses its own counter-based stream keyed by
    (seed, slice_index, i), so any subset can be regenerated independently.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    out = []
    for i in range(count):
        rng = stream(seed, slice_index, i)
        xi = _sample_xi(spec, rng, 1)
        A, b = _xi_to_arrays(spec, xi, 1)
        out.append(PhaseParameters.from_dense(A[0], b[0]))
    return out


def omega_membership(spec: OmegaSpec, params: PhaseParameters) -> bool:
    if params.k != spec.k:
        raise ValueError("dimension mismatch")
    A = params.A.to_dense()[None]
    b = params.b_array[None]
    return bool(_membership_arrays(spec, A, b)[0])


def omega_measure_exact(spec: OmegaSpec) -> float:
    """Lebesgue measure of the region in the coordinates other than a11."""
    k, a11, c1, c2 = spec.k, spec.a11, spec.c1, spec.c2
    d = k - 1
    boxes = (2 * c2) ** (d * k // 2)
    if spec.affine:
        ball = (2 * c1 * a11) ** d / math.factorial(d)
        return ball * (a11 / 4.0) * boxes * (2 * c2) ** d
    return (c1 * a11) ** d / math.factorial(d) * boxes


def omega_measure_mc(spec: OmegaSpec, samples: int, seed: int, chunk: int = 200_000):
    """Hit-or-miss estimate of the measure inside an explicit bounding box.

    Returns (estimate, standard error).
    """
    k, a11, c1, c2 = spec.k, spec.a11, spec.c1, spec.c2
    lows, highs = [], []
    # a_1l
    for _ in range(k - 1):
        lows.append(-c1 * a11)
        highs.append(0.0 if not spec.affine else c1 * a11)
    # a_lj
    for l, j in _pairs(k):
        lows.append(-(c1 * c1 * a11 + c2))
        highs.append(c1 * c1 * a11 + c2)
    if spec.affine:
        lows.append(-0.5 * a11)
        highs.append(-0.25 * a11)
        reach = abs(spec.kappa) * 0.5 * c1 * a11 + c2
        for _ in range(k - 1):
            lows.append(-reach)
            highs.append(reach)
    lows = np.array(lows)
    highs = np.array(highs)
    box_volume = float(np.prod(highs - lows))
    hits = 0
    done = 0
    for ci, start in enumerate(range(0, samples, chunk)):
        n = min(chunk, samples - start)
        rng = stream(seed, ci)
        u = lows + (highs - lows) * rng.random((n, lows.size))
        A = np.zeros((n, k, k))
        b = np.zeros((n, k))
        A[:, 0, 0] = a11
        col = 0
        for l in range(1, k):
            A[:, 0, l] = A[:, l, 0] = u[:, col]
            col += 1
        for l, j in _pairs(k):
            A[:, l, j] = A[:, j, l] = u[:, col]
            col += 1
        if spec.affine:
            b[:, 0] = u[:, col]
            col += 1
            for l in range(1, k):
                b[:, l] = u[:, col]
                col += 1
        hits += int(_membership_arrays(spec, A, b).sum())
        done += n
    frac = hits / done
    return frac * box_volume, math.sqrt(frac * (1 - frac) / done) * box_volume


# ---------------------------------------------------------------------------
# stationary phase in x1


def reduced_phase(params: PhaseParameters, x_rest) -> tuple:
    """Critical point of the phase in x1 and the phase value there."""
    a = params.A.to_dense()
    b = params.b_array
    a11 = a[0, 0]
    if not a11 > 0:
        raise ValueError("a11 must be positive")
    x_rest = np.asarray(x_rest, dtype=float)
    if x_rest.shape != (params.k - 1,):
        raise ValueError("x_rest must have length k-1")
    s = float(a[0, 1:] @ x_rest)
    x1 = -(b[0] + 2 * s) / (2 * a11)
    psi = -((b[0] + 2 * s) ** 2) / (4 * a11) + float(x_rest @ a[1:, 1:] @ x_rest) + float(b[1:] @ x_rest)
    return x1, psi


def reduced_params(params: PhaseParameters):
    """Coefficients of psi(x') = (A' x', x') + (b', x') + const."""
    a = params.A.to_dense()
    b = params.b_array
    a11 = a[0, 0]
    a1 = a[0, 1:]
    red_a = a[1:, 1:] - np.outer(a1, a1) / a11
    red_b = b[1:] - b[0] * a1 / a11
    const = -b[0] ** 2 / (4 * a11)
    return red_a, red_b, const


def _stationary_parts(params: PhaseParameters, tol: float):
    """(prefactor, reduced integral, smallest and largest critical point in x1)."""
    a = params.A.to_dense()
    b = params.b_array
    a11 = a[0, 0]
    if a11 < 100:
        raise ValueError("a11 must be at least 100 for the asymptotic regime")
    k = params.k
    red_a, red_b, const = reduced_params(params)
    base = complex(math.cos(math.pi / 4), math.sin(math.pi / 4)) * math.sqrt(math.pi) * np.exp(1j * const)
    if k == 1:
        xc = -b[0] / (2 * a11)
        return base, 1.0 + 0j, xc, xc
    corners = np.array(np.meshgrid(*([[0.0, 1.0]] * (k - 1)), indexing="ij")).reshape(k - 1, -1).T
    xcs = -(b[0] + 2 * corners @ a[0, 1:]) / (2 * a11)
    if xcs.min() < 0 or xcs.max() > 1:
        raise ValueError("critical point leaves [0, 1]: not in the stationary regime")
    reduced = PhaseParameters.from_dense(red_a, red_b)
    inner = t_box(reduced, Region.unit_cube(k - 1), QuadratureBudget(tol=tol)).value
    return base, complex(inner), float(xcs.min()), float(xcs.max())


def stationary_leading_coeff(params: PhaseParameters, tol: float = 1e-10) -> complex:
    """Leading coefficient c with T(A, b) ~ c / sqrt(a11) for large a11.

    c = e^{i pi/4} sqrt(pi) e^{i const} * int_{[0,1]^{k-1}} e^{i psi(x')} dx';
    for k = 1 a critical point on the boundary of [0, 1] contributes half.
    """
    base, inner, lo, hi = _stationary_parts(params, tol)
    if params.k == 1:
        if 0 < lo < 1:
            weight = 1.0
        elif lo == 0 or lo == 1:
            weight = 0.5
        else:
            weight = 0.0
        return complex(base * weight)
    return complex(base * inner)


def _fresnel_f(u):
    """F(u) = int_0^u e^{i y^2} dy for u >= 0, through scipy's Fresnel integrals."""
    sz, cz = fresnel(u * math.sqrt(2.0 / math.pi))
    return math.sqrt(math.pi / 2.0) * (cz + 1j * sz)


def _segment_value(a, xc):
    """sqrt(a) |int_0^1 e^{i a (x - xc)^2} dx| = |F(sqrt(a) xc) + F(sqrt(a) (1 - xc))| for xc in [0, 1]."""
    r = np.sqrt(a)
    return np.abs(_fresnel_f(r * xc) + _fresnel_f(r * (1.0 - xc)))


_SEGMENT_SCAN_PER_PERIOD = 32
_SEGMENT_SCAN_MAX_POINTS = 200_000_000


def fresnel_segment_floor(xc_lo: float, xc_hi: float, a_min: float, points: int = 200,
                          xc_points: int = 257) -> float:
    """inf over xc in [xc_lo, xc_hi] and a >= a_min of sqrt(a) |int_0^1 e^{i a (x1 - xc)^2} dx1|.

    This is the x1-integral of the phase at a critical point xc, scaled by
    sqrt(a).  Writing it as |F(sqrt(a) xc) + F(sqrt(a)(1 - xc))| with
    F(u) = int_0^u e^{i y^2} dy, whose real and imaginary parts are
    non-negative, and using |F(inf) - F(u)| <= 1/(2u) (rotate the contour
    along y^2 = u^2 + i t), the value is at least sqrt(pi)/2 - 1/(2 r sqrt(a))
    where r >= 1/2 bounds the larger endpoint distance from below, and at
    least sqrt(pi) - (1/xc_lo + 1/(1 - xc_hi))/(2 sqrt(a)) when both
    endpoints stay away from xc.  A log grid of ``points`` values
    of a over [a_min, 1e6 a_min] times ``xc_points`` critical points seeds
    the running minimum; below the a where the bound clears it, the value
    is scanned at a resolution of ``_SEGMENT_SCAN_PER_PERIOD`` samples per
    oscillation in both a and xc, and the best sample is polished by a
    bounded minimisation.  The result is the infimum, not a grid value.
    """
    if not (0.0 <= xc_lo <= xc_hi <= 1.0):
        raise ValueError("critical points must lie in [0, 1]")
    if not a_min > 0:
        raise ValueError("a_min must be positive")
    xcs = np.linspace(xc_lo, xc_hi, xc_points) if xc_hi > xc_lo else np.array([xc_lo])
    seeds = np.geomspace(a_min, 1e6 * a_min, points)
    grid = _segment_value(seeds[:, None], xcs[None, :])
    i, j = np.unravel_index(int(grid.argmin()), grid.shape)
    best, arg = float(grid[i, j]), (float(seeds[i]), float(xcs[j]))

    half, full = 0.5 * math.sqrt(math.pi), math.sqrt(math.pi)
    r = max(0.5, xc_lo, 1.0 - xc_hi)
    upper = 1e6 * a_min
    if best < half:
        upper = min(upper, (0.5 / r / (half - best)) ** 2)
    if xc_lo > 0 and xc_hi < 1 and best < full:
        upper = min(upper, (0.5 * (1.0 / xc_lo + 1.0 / (1.0 - xc_hi)) / (full - best)) ** 2)

    reach = max(xc_hi, 1.0 - xc_lo)
    da = 2.0 * math.pi / (_SEGMENT_SCAN_PER_PERIOD * reach * reach)
    def n_xc_at(a_top):
        # the phases a xc^2 and a (1 - xc)^2 move by at most 2 a reach dxc
        dxc = 2.0 * math.pi / (_SEGMENT_SCAN_PER_PERIOD * 2.0 * a_top * reach)
        return max(2, int(math.ceil((xc_hi - xc_lo) / dxc)) + 1) if xc_hi > xc_lo else 1

    n_a = max(0.0, math.ceil((upper - a_min) / da))
    if n_a * n_xc_at(upper) > _SEGMENT_SCAN_MAX_POINTS:
        raise ValueError("segment floor scan exceeds its sample budget; narrow the critical-point range")
    lo = a_min
    while lo < upper:
        a = lo + da * np.arange(4096)
        a = a[a <= upper]
        n_xc = n_xc_at(float(a[-1]))
        x = np.linspace(xc_lo, xc_hi, n_xc) if n_xc > 1 else np.array([xc_lo])
        v = _segment_value(a[:, None], x[None, :])
        i, j = np.unravel_index(int(v.argmin()), v.shape)
        if v[i, j] < best:
            best, arg = float(v[i, j]), (float(a[i]), float(x[j]))
        lo = float(a[-1]) + da

    res = minimize(lambda z: float(_segment_value(z[0], z[1])), np.array(arg), method="L-BFGS-B",
                   bounds=[(max(a_min, arg[0] - da), arg[0] + da), (xc_lo, xc_hi)])
    return float(min(best, res.fun)) if res.success else best


# ---------------------------------------------------------------------------
# experiments


def _abs_t(params: PhaseParameters, budget: QuadratureBudget):
    res = t_box(params, Region.unit_cube(params.k), budget)
    return abs(res.value), res.converged


def _map(fn, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def theta_tail_scan(
    spec: OmegaSpec,
    ps: Sequence[float],
    L: float = 100.0,
    n_slices: int = 8,
    samples_per_slice: int = 32,
    seed: int = 0,
    budget: Optional[QuadratureBudget] = None,
    threads: int = 0,
):
    """Slice estimates of  E_{Omega(a11)}[|T|^p] * mu(Omega(a11))  for several p.

    The same samples serve every p.  Returns {p: (fit, rows)} where each row
    is a dict with a11, estimate, stderr, excluded.
    """
    if L < 100:
        raise ValueError("L must be at least 100")
    if n_slices < 4:
        raise ValueError("need at least 4 slices")
    budget = budget or QuadratureBudget(tol=1e-11)
    grid = np.geomspace(L, 1e3 * L, n_slices)
    per_slice = []
    for si, a11 in enumerate(grid):
        s = spec.at(float(a11))
        samples = omega_sample(s, samples_per_slice, seed, slice_index=si)
        results = _map(lambda prm: _abs_t(prm, budget), samples, threads)
        mods = np.array([m for m, ok in results if ok])
        excluded = sum(1 for _, ok in results if not ok)
        per_slice.append((float(a11), mods, excluded, omega_measure_exact(s)))
    total = n_slices * samples_per_slice
    excluded_all = sum(e for _, _, e, _ in per_slice)
    if excluded_all > 0.01 * total:
        raise RuntimeError(f"{excluded_all} of {total} samples exhausted their quadrature budget")
    out = {}
    for p in ps:
        rows = []
        for a11, mods, excluded, mu in per_slice:
            vals = mods**p * mu
            rows.append(
                {
                    "a11": a11,
                    "estimate": float(vals.mean()),
                    "stderr": float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else float("nan"),
                    "excluded": excluded,
                }
            )
        fit = decay_fit([(r["a11"], r["estimate"]) for r in rows])
        out[float(p)] = (fit, rows)
    return out


def theta_tail_estimate(spec: OmegaSpec, p: float, L: float = 100.0, n_slices: int = 8,
                        samples_per_slice: int = 32, seed: int = 0, budget=None, threads: int = 0):
    """Power-law fit of the slice integrand of theta over a11 in [L, 1000 L].

    Expected exponent k - p/2 (affine) or k - 1 - p/2 (homogeneous); an
    exponent above -1 means the integral over a11 diverges.
    """
    return theta_tail_scan(spec, [p], L, n_slices, samples_per_slice, seed, budget, threads)[float(p)]


def expected_tail_exponent(k: int, p: float, mode: str) -> float:
    return k - p / 2 if mode == "affine" else k - 1 - p / 2


def stationary_decay_table(spec: OmegaSpec, a11_values: Iterable[float], samples: int, seed: int,
                           budget: Optional[QuadratureBudget] = None, threads: int = 0):
    """|T| and |T| sqrt(a11) statistics on Omega(a11) for each a11.

    Returns (rows, fit of mean |T| against a11, delta).  delta is a floor for
    |T| sqrt(a11) that does not use T: the smallest reduced integral
    |int e^{i psi}| over the samples times ``fresnel_segment_floor`` over the
    range of critical points seen.  The Fresnel factor matters when the
    critical point can reach the edge x1 = 0 (homogeneous phase), where the
    x1-integral drops to about half its interior value.  delta is NaN when
    that infimum cannot be certified within the scan budget.
    """
    budget = budget or QuadratureBudget(tol=1e-11)
    a11_values = [float(a) for a in a11_values]
    rows = []
    inner_min = math.inf
    xc_lo, xc_hi = math.inf, -math.inf
    for si, a11 in enumerate(a11_values):
        s = spec.at(a11)
        params = omega_sample(s, samples, seed, slice_index=si)
        res = _map(lambda prm: t_box(prm, Region.unit_cube(prm.k), budget), params, threads)
        parts = _map(lambda prm: _stationary_parts(prm, 1e-10), params, threads)
        coeffs = np.array([stationary_leading_coeff(prm) for prm in params]) if spec.k == 1 else \
            np.array([base * inner for base, inner, _, _ in parts])
        inner_min = min(inner_min, min(abs(inner) for _, inner, _, _ in parts))
        xc_lo = min(xc_lo, min(lo for _, _, lo, _ in parts))
        xc_hi = max(xc_hi, max(hi for _, _, _, hi in parts))
        mods = np.array([abs(r.value) for r in res])
        scaled = np.array([r.value for r in res]) * math.sqrt(a11)
        gaps = np.abs(scaled - coeffs)
        rows.append(
            {
                "a11": a11,
                "mean_abs_T": float(mods.mean()),
                "min_scaled": float(np.min(np.abs(scaled))),
                "min_coeff": float(np.min(np.abs(coeffs))),
                "max_gap": float(gaps.max()),
                "mean_gap": float(gaps.mean()),
                "converged": all(r.converged for r in res),
            }
        )
    fit = decay_fit([(r["a11"], r["mean_abs_T"]) for r in rows])
    try:
        delta = inner_min * fresnel_segment_floor(max(xc_lo, 0.0), min(xc_hi, 1.0), min(a11_values))
    except ValueError:
        delta = math.nan
    return rows, fit, delta


def homogeneous_t_1d(a) -> np.ndarray:
    """T(a) = int_0^1 e^{i a x^2} dx for real a, vectorised.

    Uses int_0^u e^{i y^2} dy = sqrt(pi/2) (C(z) + i S(z)), z = u sqrt(2/pi),
    with scipy's Fresnel integrals; T(-a) is the conjugate of T(a).
    """
    a = np.asarray(a, dtype=float)
    mag = np.abs(a)
    u = np.sqrt(mag)
    s, c = fresnel(u * math.sqrt(2.0 / math.pi))
    with np.errstate(invalid="ignore", divide="ignore"):
        big = math.sqrt(math.pi / 2.0) * (c + 1j * s) / np.where(u > 0, u, 1.0)
    # small |a|: Taylor series sum_n (i a)^n / (n! (2n + 1))
    small = np.zeros_like(a, dtype=complex)
    term = np.ones_like(a, dtype=complex)
    for n in range(12):
        small = small + term / (2 * n + 1)
        term = term * 1j * mag / (n + 1)
    val = np.where(mag < 1e-2, small, big)
    return np.where(a < 0, np.conj(val), val)


def homogeneous_theta_1d(p: float, cutoffs: Sequence[float], order: int = 8):
    """Cumulative int_{-R}^{R} |T(a)|^p da for k = 1 and the stabilisation verdict.

    Gauss-Legendre panels of width at most 2 pi in a (one period of the
    oscillating correction to |T|^p).  Returns (values, verdict).
    """
    if p <= 0:
        raise ValueError("p must be positive")
    r = np.asarray(cutoffs, dtype=float)
    if r.ndim != 1 or r.size < 4 or np.any(np.diff(r) <= 0) or r[0] <= 0:
        raise ValueError("need at least 4 ascending positive cutoffs")
    x, w = _legendre(order)
    values = []
    total = 0.0
    lo = 0.0
    for c in r:
        n_pan = max(1, int(math.ceil((c - lo) / (2 * math.pi))))
        edges = np.linspace(lo, c, n_pan + 1)
        parts = []
        for start in range(0, n_pan, 1 << 18):
            stop = min(start + (1 << 18), n_pan)
            e0, e1 = edges[start:stop], edges[start + 1:stop + 1]
            mid, half = 0.5 * (e0 + e1), 0.5 * (e1 - e0)
            nodes = (mid[:, None] + half[:, None] * x).ravel()
            vals = np.abs(homogeneous_t_1d(nodes)) ** p
            parts.append(float(np.dot(np.repeat(half, order) * np.tile(w, len(mid)), vals)))
        total += 2.0 * math.fsum(parts)
        values.append(total)
        lo = c
    return values, stabilization_verdict(values)
