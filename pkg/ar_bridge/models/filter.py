from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class Filter:
    """
    An autoregressive filter of order L.

    Coefficients follow the convention x_n + sum_l psi_l x_{n-l} = eps_n, so the
    conventional AR coefficients (as most other tools report them) are the
    negated values, see ``conventional``.
    """

    coeffs: np.ndarray
    noise_variance: float = 1.0
    order: int = field(init=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        coeffs.setflags(write=False)
        if self.noise_variance <= 0:
            raise ValueError(f"noise_variance must be positive, got {self.noise_variance}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "order", int(coeffs.size))

    @classmethod
    def white_noise(cls, noise_variance: float = 1.0) -> "Filter":
        return cls(np.zeros(0), noise_variance)

    @classmethod
    def from_conventional(cls, phi: Sequence[float], noise_variance: float = 1.0) -> "Filter":
        return cls(-np.asarray(phi, dtype=float), noise_variance)

    @property
    def conventional(self) -> np.ndarray:
        return -self.coeffs

    def padded(self, order: int) -> np.ndarray:
        """Coefficients extended with trailing zeros to ``order``."""
        if order < self.order:
            raise ValueError(f"cannot pad order {self.order} filter down to {order}")
        out = np.zeros(order)
        out[: self.order] = self.coeffs
        return out
