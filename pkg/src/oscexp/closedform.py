"""Closed forms for the Gaussian-regularised quadratic-phase integral.

``t_infinity`` evaluates

    (2 pi)^{k/2} det(I - iA)^{-1/2} exp(-((I - iA)^{-1} b, b) / 4)

with the square root taken factor by factor on the eigenvalues of A, each
factor on the branch of z^{-1/2} cut along the negative imaginary axis and
normalised by 1^{-1/2} = 1.  Note the (2 pi)^{k/2} prefactor: the integral
of exp(iP(x) - |x|^2) itself carries pi^{k/2}, so the two differ by the
constant 2^{k/2}; see ``oscquad.CONVENTION_CONSTANT``.
"""
from __future__ import annotations

import numpy as np

from .symlin import PhaseParameters, SymmetricMatrix, eig_sym, vandermonde_abs


def branch_inv_sqrt(lam):
    """(1 - i lam)^{-1/2} on the branch with cut along the lower imaginary axis.

    Modulus (1 + lam^2)^{-1/4}, argument arctan(lam)/2 in (-pi/4, pi/4).
    Works elementwise on arrays.
    """
    lam = np.asarray(lam, dtype=float)
    val = np.exp(-0.25 * np.log1p(lam * lam) + 0.5j * np.arctan(lam))
    return complex(val) if val.ndim == 0 else val


def _spectral_parts(params: PhaseParameters):
    spec = eig_sym(params.A)
    c = spec.rotation.T @ params.b_array
    lam = spec.eigenvalues
    return lam, c


def log_t_infinity(params: PhaseParameters) -> complex:
    """Complex logarithm of t_infinity (branch fixed by the factorwise roots)."""
    lam, c = _spectral_parts(params)
    k = params.k
    log_det = np.sum(-0.25 * np.log1p(lam * lam) + 0.5j * np.arctan(lam))
    resolvent = np.sum(c * c / (1.0 - 1j * lam))
    return complex(0.5 * k * np.log(2 * np.pi) + log_det - resolvent / 4.0)


def t_infinity(params: PhaseParameters) -> complex:
    return complex(np.exp(log_t_infinity(params)))


def abs_t_infinity_pow(params: PhaseParameters, p: float) -> float:
    """|t_infinity|^p computed in log space (no complex power, no overflow)."""
    if p <= 0:
        raise ValueError("p must be positive")
    lam, c = _spectral_parts(params)
    k = params.k
    re_resolvent = np.sum(c * c / (1.0 + lam * lam))
    log_val = 0.5 * p * k * np.log(2 * np.pi) - 0.25 * p * np.sum(np.log1p(lam * lam)) - 0.25 * p * re_resolvent
    return float(np.exp(log_val))


def b_marginal(A: SymmetricMatrix, p: float) -> float:
    """Integral over b in R^k of exp(-p ((I + A^2)^{-1} b, b) / 4).

    Equals (4 pi / p)^{k/2} det(I + A^2)^{1/2}.
    """
    if p <= 0:
        raise ValueError("p must be positive: the Gaussian in b diverges otherwise")
    lam = eig_sym(A).eigenvalues
    k = A.order
    return float(np.exp(0.5 * k * np.log(4 * np.pi / p) + 0.5 * np.sum(np.log1p(lam * lam))))


def b_marginal_8pi(A: SymmetricMatrix, p: float) -> float:
    """The marginal with the alternative constant (8 pi)^{k/2} / p^{k/2}.

    Kept only so reports can show how far that constant is from ``b_marginal``.
    """
    k = A.order
    return b_marginal(A, p) * 2.0 ** (k / 2)


def theta_infinity_integrand(lam, p: float):
    """|Vandermonde(lam)| * prod (1 + lam_l^2)^{-(p-2)/4}.

    ``lam`` may be a vector or a stack of vectors (last axis = eigenvalues).
    """
    if p <= 2:
        raise ValueError("p must exceed 2")
    lam = np.asarray(lam, dtype=float)
    weight = np.exp(-0.25 * (p - 2) * np.sum(np.log1p(lam * lam), axis=-1))
    val = vandermonde_abs(lam) * weight
    return float(val) if np.ndim(val) == 0 else val


def b_marginal_quadrature(A: SymmetricMatrix, p: float, tol: float = 1e-12) -> float:
    """The b-marginal by direct numerical integration, for k = 1 and k = 2.

    The quadratic form ((I + A^2)^{-1} b, b) comes from a dense linear solve,
    independent of the eigenvalue route used by ``b_marginal``.
    """
    from scipy import integrate

    if p <= 0:
        raise ValueError("p must be positive")
    k = A.order
    a = A.to_dense()
    m = np.linalg.solve(np.eye(k) + a @ a, np.eye(k))
    # the Gaussian has covariance (2/p)(I + A^2); integrate to 12 standard deviations
    half = 12.0 * np.sqrt(2.0 / p * (1.0 + float(np.max(np.abs(np.linalg.eigvalsh(a @ a))))))
    if k == 1:
        val, _ = integrate.quad(lambda x: np.exp(-0.25 * p * m[0, 0] * x * x), -half, half, epsabs=0.0, epsrel=tol,
                                limit=200)
    elif k == 2:
        def weight(y, x):
            return np.exp(-0.25 * p * (m[0, 0] * x * x + 2 * m[0, 1] * x * y + m[1, 1] * y * y))

        val, _ = integrate.dblquad(weight, -half, half, -half, half, epsabs=0.0, epsrel=tol)
    else:
        raise ValueError("quadrature check implemented for k = 1 and k = 2")
    return float(val)
