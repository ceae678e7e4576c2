"""
Numerics Service

Special functions, seeded sampling and dense linear algebra used by every
other service:
- chi-square(1) tail and quantile, regularized incomplete beta
- Beta and standard normal draws from an RngStream
- symmetric positive-definite solves with a one-shot diagonal jitter
- Levinson-Durbin recursion in the x_n + sum psi_l x_{n-l} = eps_n convention
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np
from scipy import special
from scipy.linalg import cho_solve
from scipy.linalg.lapack import dpotrf

from ar_bridge.core.config import get_settings
from ar_bridge.core.errors import DegenerateSequenceError, DomainError, SingularMatrixError
from ar_bridge.models import RngStream, SymmetricMatrix

logger = logging.getLogger(__name__)

Draw = Union[float, np.ndarray]


def floor_power(n: float, exponent: float) -> int:
    """floor(n ** exponent), nudged so exact powers such as 1000 ** (1/3) do not round down."""
    return int(math.floor(n ** exponent + 1e-9))


def chi2_1_tail(s: float) -> float:
    """P(W > s) for W ~ chi-square with one degree of freedom, i.e. 2(1 - Phi(sqrt(s)))."""
    if not s >= 0:
        raise DomainError(f"chi2_1_tail needs s >= 0, got {s}", s=s)
    return float(special.erfc(math.sqrt(s / 2.0)))


def chi2_1_quantile(p: float) -> float:
    """Inverse of the chi-square(1) CDF."""
    if not 0 < p < 1:
        raise DomainError(f"chi2_1_quantile needs 0 < p < 1, got {p}", p=p)
    return float(2.0 * special.erfcinv(1.0 - p) ** 2)


def beta_cdf(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if not 0 <= x <= 1 or not a > 0 or not b > 0:
        raise DomainError(f"beta_cdf out of domain: x={x}, a={a}, b={b}", x=x, a=a, b=b)
    return float(special.betainc(a, b, x))


def sample_beta(a: float, b: float, rng: RngStream, size: Optional[int] = None) -> Draw:
    """Beta(a, b) draws as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b)."""
    if not a > 0 or not b > 0:
        raise DomainError(f"sample_beta needs a, b > 0, got a={a}, b={b}", a=a, b=b)
    x = rng.generator.standard_gamma(a, size)
    y = rng.generator.standard_gamma(b, size)
    out = x / (x + y)
    return float(out) if size is None else out


def sample_std_normal(rng: RngStream, size: Optional[int] = None) -> Draw:
    out = rng.generator.standard_normal(size)
    return float(out) if size is None else out


def solve_spd(A: Union[SymmetricMatrix, np.ndarray], b: np.ndarray) -> np.ndarray:
    """
    Solve A x = b for symmetric positive-definite A by Cholesky factorization.

    When the factorization fails, a diagonal jitter of JITTER_SCALE * trace / dim
    is added once and the factorization retried; the jittered solution is only
    accepted when it satisfies the original system to 1e-8 relative.
    """
    entries = A.entries if isinstance(A, SymmetricMatrix) else np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    dim = entries.shape[0]
    if entries.shape != (dim, dim) or b.shape != (dim,):
        raise DomainError(
            f"shape mismatch: matrix {entries.shape}, vector {b.shape}",
            matrix_shape=entries.shape, vector_shape=b.shape,
        )

    factor, info = dpotrf(entries, lower=False, clean=True)
    if info == 0:
        return cho_solve((factor, False), b)
    if info < 0:
        raise DomainError(f"invalid matrix argument to Cholesky (info={info})")

    pivot = int(info)
    jitter = get_settings().JITTER_SCALE * float(np.trace(entries)) / dim
    if not jitter > 0:
        raise SingularMatrixError(f"matrix is not positive definite at pivot {pivot}", pivot=pivot)
    logger.debug(f"Cholesky failed at pivot {pivot}, retrying with jitter {jitter:.3e}")

    factor, info = dpotrf(entries + jitter * np.eye(dim), lower=False, clean=True)
    if info != 0:
        raise SingularMatrixError(f"matrix is not positive definite at pivot {int(info)}", pivot=int(info))

    x = cho_solve((factor, False), b)
    residual = np.max(np.abs(entries @ x - b))
    if residual > 1e-8 * max(np.max(np.abs(b)), np.finfo(float).tiny):
        raise SingularMatrixError(
            f"matrix is numerically singular at pivot {pivot} (residual {residual:.3e})",
            pivot=pivot,
        )
    return x


def expand_partial_coefficients(last_coeffs: np.ndarray) -> np.ndarray:
    """Build Psi_L from psi_{1,1}..psi_{L,L} with the Levinson update."""
    psi = np.zeros(0)
    for k in np.asarray(last_coeffs, dtype=float).reshape(-1):
        psi = np.append(psi + k * psi[::-1], k)
    return psi


@dataclass(frozen=True, eq=False)
class LevinsonResult:
    """Per-order filters Psi_1..Psi_L (index 0 is the empty filter), errors e_0..e_L and last coefficients."""

    filters: List[np.ndarray]
    errors: np.ndarray
    last_coeffs: np.ndarray


def levinson(gamma: np.ndarray, keep_filters: bool = True) -> LevinsonResult:
    """
    Order-recursive solution of Gamma_L Psi_L = -gamma_L for L = 1..len(gamma)-1.
    With ``keep_filters`` false only the final filter is kept in ``filters``.

    psi_{L,L} = -(gamma_L + sum_l psi_{L-1,l} gamma_{L-l}) / e_{L-1}
    psi_{L,l} = psi_{L-1,l} + psi_{L,L} psi_{L-1,L-l}
    e_L       = e_{L-1} (1 - psi_{L,L}^2),  e_0 = gamma_0
    """
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    if gamma.size == 0 or not gamma[0] > 0:
        raise DegenerateSequenceError("gamma_0 must be positive", order=0)

    max_order = gamma.size - 1
    errors = np.empty(max_order + 1)
    last = np.empty(max_order)
    errors[0] = gamma[0]
    filters = [np.zeros(0)]
    psi = np.zeros(0)

    for order in range(1, max_order + 1):
        k = -(gamma[order] + psi @ gamma[order - 1:0:-1]) / errors[order - 1]
        psi = np.append(psi + k * psi[::-1], k)
        errors[order] = errors[order - 1] * (1.0 - k * k)
        last[order - 1] = k
        if not errors[order] > 0:
            raise DegenerateSequenceError(
                f"prediction error vanished at order {order}", order=order, error=float(errors[order])
            )
        if keep_filters:
            filters.append(psi)

    if not keep_filters:
        filters = [psi]
    return LevinsonResult(filters=filters, errors=errors, last_coeffs=last)
