from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """Dense symmetric matrix; the upper triangle is mirrored so entries match bit for bit."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        a = np.triu(a) + np.triu(a, 1).T
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)


@dataclass(frozen=True, eq=False)
class AutocovarianceTable:
    """Autocovariances gamma_0..gamma_K of a stationary process."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size == 0 or values[0] <= 0:
            raise ValueError("gamma_0 must be positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def max_lag(self) -> int:
        return self.values.size - 1

    def toeplitz(self, dimension: int) -> np.ndarray:
        """Gamma_L, the L x L Toeplitz matrix [gamma_{i-j}]."""
        if dimension > self.values.size:
            raise ValueError(f"need {dimension} lags, table holds {self.values.size}")
        return toeplitz(self.values[:dimension])
