"""Small dense symmetric linear algebra.

Symmetric matrices are stored as their packed upper triangle in row-major
order (a11, a12, ..., a1k, a22, ..., akk).  That ordering is also the
coordinate order of the volume element da on the space of symmetric
matrices used throughout the package.

The eigensolver is a cyclic Jacobi iteration written to run on a whole
stack of matrices at once, so Monte-Carlo code can diagonalise 10^6 small
matrices without a Python loop per matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

OFFDIAG_RTOL = 1e-14
MAX_SWEEPS = 50


def packed_size(k: int) -> int:
    return k * (k + 1) // 2


def order_from_packed(n: int) -> int:
    k = int(round((np.sqrt(8 * n + 1) - 1) / 2))
    if packed_size(k) != n:
        raise ValueError(f"{n} coefficients do not form a packed symmetric matrix")
    return k


@dataclass(frozen=True)
class SymmetricMatrix:
    """Real symmetric k x k matrix held as a packed upper triangle."""

    order: int
    coeffs: tuple

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        coeffs = tuple(float(c) for c in self.coeffs)
        if len(coeffs) != packed_size(self.order):
            raise ValueError(
                f"expected {packed_size(self.order)} coefficients for order {self.order}, "
                f"got {len(coeffs)}"
            )
        if not all(np.isfinite(coeffs)):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_packed(cls, coeffs: Sequence[float]) -> "SymmetricMatrix":
        return cls(order_from_packed(len(coeffs)), tuple(coeffs))

    @classmethod
    def from_dense(cls, a) -> "SymmetricMatrix":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("dense matrix must be square")
        if not np.allclose(a, a.T, rtol=0, atol=1e-12 * (1 + np.abs(a).max())):
            raise ValueError("dense matrix is not symmetric")
        k = a.shape[0]
        iu = np.triu_indices(k)
        return cls(k, tuple(a[iu]))

    @classmethod
    def zeros(cls, k: int) -> "SymmetricMatrix":
        return cls(k, (0.0,) * packed_size(k))

    @classmethod
    def identity(cls, k: int) -> "SymmetricMatrix":
        return cls.from_dense(np.eye(k))

    def _index(self, l: int, m: int) -> int:
        if l > m:
            l, m = m, l
        k = self.order
        if not (0 <= l < k and 0 <= m < k):
            raise IndexError((l, m))
        return l * k - l * (l - 1) // 2 + (m - l)

    def get(self, l: int, m: int) -> float:
        """Entry a_lm with zero-based indices; symmetric in (l, m)."""
        return self.coeffs[self._index(l, m)]

    def to_dense(self) -> np.ndarray:
        k = self.order
        a = np.zeros((k, k))
        iu = np.triu_indices(k)
        a[iu] = self.coeffs
        return a + np.triu(a, 1).T

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __neg__(self) -> "SymmetricMatrix":
        return SymmetricMatrix(self.order, tuple(-c for c in self.coeffs))

    def scaled(self, t: float) -> "SymmetricMatrix":
        return SymmetricMatrix(self.order, tuple(t * c for c in self.coeffs))


@dataclass(frozen=True)
class PhaseParameters:
    """The pair (A, b) of the quadratic phase (Ax, x) + (b, x)."""

    A: SymmetricMatrix
    b: tuple

    def __post_init__(self):
        b = tuple(float(v) for v in self.b)
        if len(b) != self.A.order:
            raise ValueError(f"b has length {len(b)} but A has order {self.A.order}")
        if not all(np.isfinite(b)):
            raise ValueError("b must be finite")
        object.__setattr__(self, "b", b)

    @classmethod
    def homogeneous(cls, A: SymmetricMatrix) -> "PhaseParameters":
        return cls(A, (0.0,) * A.order)

    @classmethod
    def from_dense(cls, a, b=None) -> "PhaseParameters":
        A = SymmetricMatrix.from_dense(a)
        return cls(A, tuple(b) if b is not None else (0.0,) * A.order)

    @property
    def k(self) -> int:
        return self.A.order

    @property
    def b_array(self) -> np.ndarray:
        return np.array(self.b)

    def conjugate(self) -> "PhaseParameters":
        """Parameters (-A, -b), whose integrals are the complex conjugates."""
        return PhaseParameters(-self.A, tuple(-v for v in self.b))


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    rotation: np.ndarray

    def reconstruct(self) -> np.ndarray:
        q = self.rotation
        return (q * self.eigenvalues) @ q.T


def quadratic_phase_eval(params: PhaseParameters, x) -> float:
    """(Ax, x) + (b, x) at one point, or at each row of a 2-D array of points."""
    x = np.asarray(x, dtype=float)
    k = params.k
    if x.shape[-1] != k:
        raise ValueError(f"point has dimension {x.shape[-1]}, phase has dimension {k}")
    a = params.A.to_dense()
    val = np.einsum("...i,ij,...j->...", x, a, x) + x @ params.b_array
    return float(val) if val.ndim == 0 else val


def jacobi_eigh(a: np.ndarray, rtol: float = OFFDIAG_RTOL, max_sweeps: int = MAX_SWEEPS):
    """Cyclic Jacobi diagonalisation of a stack of symmetric matrices.

    ``a`` has shape (..., k, k).  Returns (eigenvalues, rotations) with the
    eigenvalues ascending and every rotation in SO(k), so that
    ``rotations @ diag(eigenvalues) @ rotations^T`` reproduces ``a``.
    """
    a = np.array(a, dtype=float, copy=True)
    if a.shape[-1] != a.shape[-2]:
        raise ValueError("matrices must be square")
    batch_shape = a.shape[:-2]
    k = a.shape[-1]
    a = a.reshape((-1, k, k))
    v = np.broadcast_to(np.eye(k), a.shape).copy()

    fro = np.sqrt(np.einsum("nij,nij->n", a, a))
    target = rtol * fro
    pairs = [(p, q) for p in range(k - 1) for q in range(p + 1, k)]
    rows, cols = np.triu_indices(k, 1)
    for _ in range(max_sweeps):
        # summed directly: a difference of squares would floor at sqrt(eps) * fro
        off = np.sqrt(2.0 * np.sum(a[:, rows, cols] ** 2, axis=1))
        if np.all(off <= target):
            break
        for p, q in pairs:
            apq = a[:, p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            with np.errstate(over="ignore", divide="ignore"):
                theta = np.where(active, (a[:, q, q] - a[:, p, p]) / (2.0 * np.where(active, apq, 1.0)), 0.0)
                # theta = +-inf gives t = 0: the entry is negligible against the diagonal gap
                t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(theta == 0.0, 1.0, t)
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            c_ = c[:, None]
            s_ = s[:, None]
            col_p = a[:, :, p].copy()
            col_q = a[:, :, q].copy()
            a[:, :, p] = c_ * col_p - s_ * col_q
            a[:, :, q] = s_ * col_p + c_ * col_q
            row_p = a[:, p, :].copy()
            row_q = a[:, q, :].copy()
            a[:, p, :] = c_ * row_p - s_ * row_q
            a[:, q, :] = s_ * row_p + c_ * row_q
            a[:, p, q] = 0.0
            a[:, q, p] = 0.0
            vp = v[:, :, p].copy()
            vq = v[:, :, q].copy()
            v[:, :, p] = c_ * vp - s_ * vq
            v[:, :, q] = s_ * vp + c_ * vq

    lam = np.einsum("nii->ni", a)
    order = np.argsort(lam, axis=1, kind="stable")
    lam = np.take_along_axis(lam, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    flip = np.linalg.det(v) < 0
    v[flip, :, -1] *= -1.0
    return lam.reshape(batch_shape + (k,)), v.reshape(batch_shape + (k, k))


def eig_sym(A: SymmetricMatrix) -> Spectrum:
    lam, v = jacobi_eigh(A.to_dense())
    return Spectrum(lam, v)


def log_det_one_plus_A_sq(A: SymmetricMatrix) -> float:
    lam = eig_sym(A).eigenvalues
    return float(np.sum(np.log1p(lam * lam)))


def det_one_plus_A_sq(A: SymmetricMatrix) -> float:
    """det(I + A^2) = prod(1 + lambda_j^2)."""
    lam = eig_sym(A).eigenvalues
    return float(np.prod(1.0 + lam * lam))


def vandermonde_abs(lam) -> float:
    """prod_{l<m} |lambda_m - lambda_l|; 1 for a single eigenvalue."""
    lam = np.asarray(lam, dtype=float)
    diff = lam[..., None, :] - lam[..., :, None]
    iu = np.triu_indices(lam.shape[-1], 1)
    val = np.prod(np.abs(diff[..., iu[0], iu[1]]), axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def resolvent_quadratic(A: SymmetricMatrix, b) -> complex:
    """((I - iA)^{-1} b, b) via the spectral decomposition of A."""
    b = np.asarray(b, dtype=float)
    if b.shape != (A.order,):
        raise ValueError(f"b must have length {A.order}")
    spec = eig_sym(A)
    c = spec.rotation.T @ b
    return complex(np.sum(c * c / (1.0 - 1j * spec.eigenvalues)))
