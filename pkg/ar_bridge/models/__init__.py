# Import all domain models here so callers can use ar_bridge.models directly

from .filter import Filter
from .fit_table import OrderFitTable, SampleMoments
from .rng import RngStream
from .autocovariance import AutocovarianceTable, SymmetricMatrix
