"""Fourier transforms of indicator functions and their L^q behaviour.

Convention: chi_hat(b) = int_D exp(-2 pi i (b, x)) dx, for which Plancherel
holds without 2 pi factors, so int |chi_hat|^2 = measure(D).

Decay along rays decides the L^q membership: a box or polygon decays like
|b|^{-1} only on a few lines and like |b|^{-2} elsewhere, so its transform is
in L^q for every q > 1; a disc decays like |b|^{-3/2} in every direction
and is in L^q(R^2) only for q > 4/3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, special

from .fitting import PowerLawFit, decay_fit, stabilization_verdict, CONVERGING
from .oscquad import _legendre

__all__ = [
    "Shape2D",
    "phi",
    "bessel_j1",
    "chi_hat",
    "chi_hat_box",
    "chi_hat_polygon",
    "chi_hat_disc",
    "LqEstimate",
    "lq_norm_estimate",
    "envelope_slope",
    "disc_envelope_slope",
    "summability_exponent",
]

TWO_PI = 2.0 * math.pi
SMALL_T = 1e-4
MOMENT_RADIUS = 0.1
ANGLES = 512
ANGULAR_TOLERANCE = 5e-3


# ---------------------------------------------------------------------------
# shapes


def _segments_cross(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(p3, p4, p1), orient(p3, p4, p2)
    d3, d4 = orient(p1, p2, p3), orient(p1, p2, p4)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 * d2 != 0 and d3 * d4 != 0:
        return True
    return False


@dataclass(frozen=True)
class Shape2D:
    """A box [0,1]^k, a simple polygon (counterclockwise vertices) or a disc."""

    kind: str
    k: int = 2
    vertices: Optional[np.ndarray] = field(default=None, compare=False)
    center: tuple = (0.0, 0.0)
    radius: float = 0.0

    def __post_init__(self):
        if self.kind == "box":
            if self.k < 1:
                raise ValueError("box dimension must be positive")
        elif self.kind == "polygon":
            v = np.asarray(self.vertices, dtype=float)
            if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
                raise ValueError("polygon needs at least 3 vertices in the plane")
            if not np.all(np.isfinite(v)):
                raise ValueError("polygon vertices must be finite")
            n = v.shape[0]
            area = 0.5 * float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1]))
            if area <= 1e-14 * max(1.0, float(np.ptp(v)) ** 2):
                raise ValueError("polygon must be non-degenerate and counterclockwise")
            for i in range(n):
                for j in range(i + 2, n):
                    if i == 0 and j == n - 1:
                        continue
                    if _segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                        raise ValueError("polygon edges intersect")
            v.setflags(write=False)
            object.__setattr__(self, "vertices", v)
            object.__setattr__(self, "k", 2)
        elif self.kind == "disc":
            if not self.radius > 0:
                raise ValueError("disc radius must be positive")
            object.__setattr__(self, "k", 2)
        else:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @classmethod
    def box(cls, k: int = 2) -> "Shape2D":
        return cls("box", k=k)

    @classmethod
    def polygon(cls, vertices) -> "Shape2D":
        return cls("polygon", vertices=np.array(vertices, dtype=float))

    @classmethod
    def disc(cls, radius: float = 1.0, center=(0.0, 0.0)) -> "Shape2D":
        return cls("disc", radius=float(radius), center=tuple(center))

    @property
    def measure(self) -> float:
        if self.kind == "box":
            return 1.0
        if self.kind == "disc":
            return math.pi * self.radius**2
        v = self.vertices
        return 0.5 * float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1]))

    @property
    def diameter(self) -> float:
        if self.kind == "box":
            return math.sqrt(self.k)
        if self.kind == "disc":
            return 2 * self.radius
        v = self.vertices
        return float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1)))


# ---------------------------------------------------------------------------
# transforms


def phi(t):
    """int_0^1 exp(-2 pi i t s) ds = (1 - e^{-2 pi i t}) / (2 pi i t), with phi(0) = 1."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < SMALL_T
    ts = np.where(small, 1.0, t)
    z = -TWO_PI * 1j * t
    series = 1 + z / 2 + z * z / 6 + z**3 / 24 + z**4 / 120
    val = np.where(small, series, (1 - np.exp(-TWO_PI * 1j * ts)) / (TWO_PI * 1j * ts))
    return complex(val) if val.ndim == 0 else val


def chi_hat_box(b):
    """Transform of the unit cube [0,1]^k at b (last axis = coordinates)."""
    b = np.asarray(b, dtype=float)
    val = np.prod(np.atleast_1d(phi(b)), axis=-1) if b.ndim else phi(b)
    return complex(val) if np.ndim(val) == 0 else val


def _complete_homogeneous(values, n):
    """h_n(l1, l2, l3) for arrays l of shape (..., 3), by the recurrence over variables."""
    l1, l2, l3 = values[..., 0], values[..., 1], values[..., 2]
    # h_n(l1) = l1^n; adding a variable: h_n(x, y) = sum_j h_{n-j}(x) y^j
    h = [l1**j for j in range(n + 1)]
    for y in (l2, l3):
        new = []
        for m in range(n + 1):
            acc = np.zeros_like(l1)
            yp = np.ones_like(l1)
            for j in range(m + 1):
                acc = acc + h[m - j] * yp
                yp = yp * y
            new.append(acc)
        h = new
    return h[n]


def _polygon_moment_series(v: np.ndarray, b: np.ndarray, terms: int = 18) -> np.ndarray:
    """sum_n (-2 pi i)^n / n! int_P (b.x)^n dx, exact moments by a triangle fan."""
    tri_a = v[0]
    out = np.zeros(b.shape[0], dtype=complex)
    for j in range(1, v.shape[0] - 1):
        p, q = v[j], v[j + 1]
        area = 0.5 * ((p[0] - tri_a[0]) * (q[1] - tri_a[1]) - (q[0] - tri_a[0]) * (p[1] - tri_a[1]))
        ell = np.stack([b @ tri_a, b @ p, b @ q], axis=-1)
        acc = np.zeros(b.shape[0], dtype=complex)
        coef = 1.0 + 0j
        for n in range(terms):
            # int_T l^n = 2 |T| n! / (n + 2)! h_n(l1, l2, l3)
            moment = 2.0 * area / ((n + 1) * (n + 2)) * _complete_homogeneous(ell, n)
            acc = acc + coef * moment
            coef = coef * (-TWO_PI * 1j) / (n + 1)
        out = out + acc
    return out


def chi_hat_polygon(shape: Shape2D, b):
    """Transform of a polygon by summing exact edge integrals.

    By the divergence theorem, for b != 0,
        chi_hat(b) = i / (2 pi |b|^2) sum_edges (b . (dy, -dx)) e^{-2 pi i b.P} phi(b.(Q - P))
    for each counterclockwise edge P -> Q.  Close to b = 0 the sum cancels
    badly, so there the Taylor series with exact moments is used instead.
    """
    if shape.kind != "polygon":
        raise ValueError("shape must be a polygon")
    b = np.asarray(b, dtype=float)
    scalar = b.ndim == 1
    b = np.atleast_2d(b)
    if b.shape[-1] != 2:
        raise ValueError("b must be a 2-vector")
    v = shape.vertices
    center = v.mean(axis=0)
    rel = v - center
    reach = float(np.max(np.linalg.norm(rel, axis=1)))
    norm2 = np.sum(b * b, axis=1)
    small = np.sqrt(norm2) * reach <= MOMENT_RADIUS
    out = np.empty(b.shape[0], dtype=complex)
    if np.any(~small):
        bb = b[~small]
        acc = np.zeros(bb.shape[0], dtype=complex)
        for j in range(rel.shape[0]):
            p, q = rel[j], rel[(j + 1) % rel.shape[0]]
            d = q - p
            acc = acc + (bb @ np.array([d[1], -d[0]])) * np.exp(-TWO_PI * 1j * (bb @ p)) * phi(bb @ d)
        out[~small] = 1j * acc / (TWO_PI * norm2[~small])
    if np.any(small):
        out[small] = _polygon_moment_series(rel, b[small])
    out = out * np.exp(-TWO_PI * 1j * (b @ center))
    return complex(out[0]) if scalar else out


# --- Bessel J1 ---------------------------------------------------------------

_J1_SERIES_LIMIT = 12.0


def _j1_series(x):
    half = 0.5 * x
    q = -half * half
    term = half.copy()
    total = term.copy()
    for m in range(1, 60):
        term = term * q / (m * (m + 1))
        total = total + term
    return total


def _j1_hankel(x):
    # J1(x) = sqrt(2 / (pi x)) (P cos chi - Q sin chi), chi = x - 3 pi / 4, mu = 4
    mu = 4.0
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    done = np.zeros(x.shape, dtype=bool)
    last = np.full(x.shape, np.inf)
    for k in range(1, 60):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        # stop each entry at its smallest term (optimal truncation of the asymptotic series)
        done = done | (mag >= last)
        add = np.where(done, 0.0, term)
        if k % 2 == 1:
            q = q + add * (1 if (k // 2) % 2 == 0 else -1)
        else:
            p = p + add * (1 if (k // 2) % 2 == 0 else -1)
        last = np.where(done, last, mag)
        if np.all(done):
            break
    chi = x - 0.75 * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j1(x):
    """Order-one Bessel function: power series for |x| <= 12, Hankel expansion beyond."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    out = np.empty_like(ax)
    lo = ax <= _J1_SERIES_LIMIT
    if np.any(lo):
        out[lo] = _j1_series(ax[lo])
    if np.any(~lo):
        out[~lo] = _j1_hankel(ax[~lo])
    out = np.sign(x) * out
    return float(out) if out.ndim == 0 else out


def chi_hat_disc(radius: float, b):
    """Transform of the disc of given radius centred at 0: R J1(2 pi R |b|) / |b|."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    b = np.asarray(b, dtype=float)
    rho = np.sqrt(np.sum(b * b, axis=-1))
    small = rho < 1e-8
    rs = np.where(small, 1.0, rho)
    # J1(x)/x -> 1/2 at 0
    val = np.where(small, math.pi * radius**2, radius * bessel_j1(TWO_PI * radius * rs) / rs)
    return float(val) if np.ndim(val) == 0 else val


def chi_hat(shape: Shape2D, b):
    """Transform of any supported shape."""
    if shape.kind == "box":
        return chi_hat_box(b)
    if shape.kind == "polygon":
        return chi_hat_polygon(shape, b)
    b = np.asarray(b, dtype=float)
    val = chi_hat_disc(shape.radius, b) * np.exp(-TWO_PI * 1j * (b @ np.asarray(shape.center)))
    return complex(val) if np.ndim(val) == 0 else val


# ---------------------------------------------------------------------------
# L^q norms over growing balls


@dataclass(frozen=True)
class LqEstimate:
    shape_kind: str
    q: float
    cutoffs: tuple
    values: tuple
    verdict: str
    tail_slope: float
    angular_change: float

    @property
    def value(self) -> float:
        return self.values[-1]

    @property
    def converged(self) -> bool:
        return self.verdict == CONVERGING and self.angular_change < ANGULAR_TOLERANCE


def _abs_sin_moment(q: float, n0: int, n1: int) -> float:
    """int_{n0}^{n1} |sin(pi t)|^q (pi t)^{-q} dt for integers 1 <= n0 <= n1.

    Summing the unit periods gives Hurwitz zeta functions:
    pi^{-q} int_0^1 |sin(pi s)|^q (zeta(q, n0 + s) - zeta(q, n1 + s)) ds.
    """
    if n1 == n0:
        return 0.0

    def f(s):
        return abs(math.sin(math.pi * s)) ** q * (special.zeta(q, n0 + s) - special.zeta(q, n1 + s))

    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    return math.pi ** (-q) * val


def _phi_power_integral(q: float, r: float) -> float:
    """int_0^r |phi(t)|^q dt for integer r >= 1, with |phi(t)| = |sin(pi t)| / (pi t)."""
    head, _ = integrate.quad(lambda t: abs(phi(t)) ** q, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12)
    return head + _abs_sin_moment(q, 1, int(round(r)))


def _box_lq(shape: Shape2D, q: float, cutoffs: np.ndarray) -> list:
    if np.any(np.abs(cutoffs - np.round(cutoffs)) > 1e-9) or np.any(cutoffs < 1):
        raise ValueError("box cutoffs must be integers >= 1")
    one_d = [2.0 * _phi_power_integral(q, float(c)) for c in cutoffs]
    return [v**shape.k for v in one_d]


def _disc_radial(radius: float, q: float, cutoffs: np.ndarray, order: int = 12) -> list:
    """2 pi int_0^r rho |chi_hat|^q drho with panels split at the zeros of J1."""
    top = TWO_PI * radius * cutoffs[-1]
    n_zeros = int(top / math.pi) + 2
    zeros = special.jn_zeros(1, n_zeros) / (TWO_PI * radius)
    x, w = _legendre(order)
    values = []
    lo = 0.0
    total = 0.0
    for c in cutoffs:
        edges = np.concatenate([[lo], zeros[(zeros > lo) & (zeros < c)], [c]])
        mid, half = 0.5 * (edges[:-1] + edges[1:]), 0.5 * np.diff(edges)
        nodes = (mid[:, None] + half[:, None] * x).ravel()
        vals = nodes * np.abs(chi_hat_disc(radius, nodes[:, None] * np.array([1.0, 0.0]))) ** q
        total += TWO_PI * float(np.dot(np.repeat(half, order) * np.tile(w, len(mid)), vals))
        values.append(total)
        lo = c
    return values


def _polygon_polar(shape: Shape2D, q: float, cutoffs: np.ndarray, angles: int, order: int = 8) -> list:
    """Polar rule: uniform angles, Gauss-Legendre radial panels half an oscillation period wide."""
    theta = (np.arange(angles) + 0.5) * TWO_PI / angles
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    width = 0.5 / shape.diameter
    x, w = _legendre(order)
    values = []
    lo = 0.0
    total = 0.0
    for c in cutoffs:
        n_pan = max(1, int(math.ceil((c - lo) / width)))
        edges = np.linspace(lo, c, n_pan + 1)
        mid, half = 0.5 * (edges[:-1] + edges[1:]), 0.5 * np.diff(edges)
        rho = (mid[:, None] + half[:, None] * x).ravel()
        rw = np.repeat(half, order) * np.tile(w, len(mid)) * rho
        parts = []
        for start in range(0, rho.size, 4096):
            r = rho[start:start + 4096]
            pts = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 2)
            vals = np.abs(chi_hat_polygon(shape, pts)).reshape(r.size, angles) ** q
            parts.append(float(np.dot(rw[start:start + 4096], vals.sum(axis=1))))
        total += math.fsum(parts) * TWO_PI / angles
        values.append(total)
        lo = c
    return values


def default_ladder(r_max: float, factor: float = 10.0, count: int = 4) -> np.ndarray:
    return r_max / factor ** np.arange(count - 1, -1, -1)


def lq_norm_estimate(shape: Shape2D, q: float, r_max: float, cutoffs: Optional[Sequence[float]] = None,
                     angles: int = ANGLES) -> LqEstimate:
    """int |chi_hat|^q over growing regions up to r_max, with a convergence verdict.

    Boxes integrate over cubes [-r, r]^k (the integrand is a product of 1-D
    factors); discs and polygons integrate over discs |b| <= r.  The verdict
    follows the same stabilisation rule as the eigenvalue integral, and
    ``tail_slope`` is the log-log slope of the increments against the
    cutoffs.  Polygons are integrated twice, with ``angles`` and
    2 ``angles`` directions; ``angular_change`` is the relative difference.
    """
    if q <= 1:
        raise ValueError("q must exceed 1")
    r = np.asarray(cutoffs if cutoffs is not None else default_ladder(r_max), dtype=float)
    if r.size < 4 or np.any(np.diff(r) <= 0) or abs(r[-1] - r_max) > 1e-9 * r_max:
        raise ValueError("need at least 4 ascending cutoffs ending at r_max")
    change = 0.0
    if shape.kind == "box":
        values = _box_lq(shape, q, r)
    elif shape.kind == "disc":
        values = _disc_radial(shape.radius, q, r)
    else:
        values = _polygon_polar(shape, q, r, angles)
        finer = _polygon_polar(shape, q, r, 2 * angles)
        change = float(abs(finer[-1] - values[-1]) / abs(finer[-1]))
        values = finer
    inc = np.diff(values)
    if np.all(inc > 0):
        slope = decay_fit(np.column_stack([r[1:], inc])).exponent if inc.size >= 3 else float("nan")
    else:
        slope = float("nan")
    return LqEstimate(shape.kind, float(q), tuple(r), tuple(values), stabilization_verdict(values), slope, change)


# ---------------------------------------------------------------------------
# decay envelopes


def envelope_slope(shape: Shape2D, direction, r_lo: float = 10.0, r_hi: float = 1e3, points: int = 21,
                   window: Optional[float] = None, samples: int = 400) -> PowerLawFit:
    """Fit the local maxima of |chi_hat| along a ray against the distance.

    Each local maximum is taken over [r, r + window]; the default window
    spans two oscillation periods of the slowest oscillating factor.
    """
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    if window is None:
        if shape.kind == "box":
            comps = np.abs(d[np.abs(d) > 1e-12])
            window = 2.0 / float(comps.min())
        else:
            window = 2.0 / shape.diameter
    centers = np.geomspace(r_lo, r_hi, points)
    env = []
    for c in centers:
        rho = np.linspace(c, c + window, samples)
        env.append(float(np.max(np.abs(chi_hat(shape, rho[:, None] * d)))))
    return decay_fit(np.column_stack([centers, env]))


def disc_envelope_slope(radius: float = 1.0, r_lo: float = 10.0, r_hi: float = 1e3, points: int = 21) -> PowerLawFit:
    return envelope_slope(Shape2D.disc(radius), (1.0, 0.0), r_lo, r_hi, points)


def summability_exponent(q: float) -> float:
    """Summability threshold 6 - 2/q for T over R^3 when chi_hat_D is in L^q(R^2)."""
    if not q >= 1:
        raise ValueError("q must be at least 1")
    return 6.0 - 2.0 / q
