"""Weekly money-market liquidity co-movements from an AR(1)-DCC(1,1)-GARCH(1,1) model.

Pipeline: daily rates -> weekly spreads (``data``), unit-root pretests
(``stationarity``), Student-t QML fit (``estimation``), co-movement paths
(``correlation``), synthetic panels (``simulation``), CLI (``cli``).
"""

__version__ = "0.1.0"

from comove._backend import BACKEND
from comove.correlation import ComovementSeries, CorrelationPath, DccParams
from comove.data import DailyRateTable, SpreadPanel
from comove.likelihood import LogLikelihood, SystemParams, log_likelihood
from comove.mean import MeanParams
from comove.variance import GarchParams

__all__ = [
    "BACKEND",
    "ComovementSeries",
    "CorrelationPath",
    "DailyRateTable",
    "DccParams",
    "GarchParams",
    "LogLikelihood",
    "MeanParams",
    "SpreadPanel",
    "SystemParams",
    "log_likelihood",
]
