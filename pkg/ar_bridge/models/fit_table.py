from dataclasses import dataclass, field
from typing import List

import numpy as np

from ar_bridge.models.filter import Filter


@dataclass(frozen=True, eq=False)
class SampleMoments:
    """
    gamma_hat[i, j] = (1/N) sum_{n=L_max+1}^{N0} x_{n-i} x_{n-j} for 0 <= i, j <= L_max,
    with N = N0 - L_max.
    """

    gamma_hat: np.ndarray
    L_max: int
    N: int
    N0: int
    degenerate: bool = False

    def gamma_vector(self, order: int) -> np.ndarray:
        """gamma_hat_L = [gamma_hat_{1,0}, ..., gamma_hat_{L,0}]."""
        return self.gamma_hat[1: order + 1, 0]

    def gamma_matrix(self, order: int) -> np.ndarray:
        """Gamma_hat_L = [gamma_hat_{i,j}] for i, j = 1..L."""
        return self.gamma_hat[1: order + 1, 1: order + 1]


@dataclass(frozen=True, eq=False)
class OrderFitTable:
    """Least-squares fits for every order 0..L_max on one set of sample moments."""

    filters: List[Filter]
    e_hat: np.ndarray
    gain_hat: np.ndarray
    floored: np.ndarray
    N: int
    N0: int
    L_max: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "L_max", len(self.filters) - 1)

    @property
    def degenerate(self) -> bool:
        return bool(self.floored.any())

    def log_e(self) -> np.ndarray:
        """log e_hat_L for L = 1..L_max."""
        return np.log(self.e_hat[1:])

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "N0": self.N0,
            "L_max": self.L_max,
            "orders": [
                {
                    "order": order,
                    "coeffs": self.filters[order].coeffs.tolist(),
                    "e_hat": float(self.e_hat[order]),
                    "gain_hat": None if order == 0 else float(self.gain_hat[order]),
                    "degenerate": bool(self.floored[order]),
                }
                for order in range(self.L_max + 1)
            ],
        }
