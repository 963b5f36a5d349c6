"""Per-series GARCH(1,1) conditional variances and standardization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from comove._backend import kernels

__all__ = ["GarchParams", "garch_filter", "standardize"]


@dataclass(frozen=True)
class GarchParams:
    omega: np.ndarray
    kappa: np.ndarray
    lam: np.ndarray

    def __post_init__(self) -> None:
        arrs = []
        for name in ("omega", "kappa", "lam"):
            a = np.asarray(getattr(self, name), dtype=float).copy()
            if a.ndim != 1:
                raise ValueError(f"{name} must be one-dimensional")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
            arrs.append(a)
        omega, kappa, lam = arrs
        if not (omega.shape == kappa.shape == lam.shape):
            raise ValueError("omega, kappa and lam must have equal length")
        if np.any(omega <= 0) or np.any(kappa < 0) or np.any(lam < 0):
            raise ValueError("GARCH parameters need omega > 0, kappa >= 0, lam >= 0")
        if np.any(kappa + lam >= 1.0):
            raise ValueError("GARCH parameters need kappa + lam < 1")

    @property
    def unconditional_variance(self) -> np.ndarray:
        return self.omega / (1.0 - self.kappa - self.lam)


def garch_filter(r, params: GarchParams, h_init=None) -> np.ndarray:
    """Conditional variances h with ``h[0] = h_init``.

    ``h_init`` defaults to the sample variance of each innovation series.
    """
    r = np.ascontiguousarray(r, dtype=float)
    if h_init is None:
        h_init = r.var(axis=0)
    h_init = np.ascontiguousarray(np.broadcast_to(h_init, (r.shape[1],)), dtype=float)
    if np.any(~(h_init > 0)):
        raise ValueError("h_init must be strictly positive")
    h = np.empty_like(r)
    kernels.garch_recursion(r, params.omega, params.kappa, params.lam, h_init, h)
    return h


def standardize(r, h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if np.any(~(h > 0)):
        raise ValueError("variances must be strictly positive")
    return np.asarray(r, dtype=float) / np.sqrt(h)
