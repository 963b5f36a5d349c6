"""AR(1) conditional mean, with the TB-yield covariate on the PFB-TB equation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from comove.exceptions import PanelError

__all__ = ["MeanParams", "mean_filter", "mean_unfilter"]


@dataclass(frozen=True)
class MeanParams:
    mu: np.ndarray
    phi: np.ndarray
    tau: float

    def __post_init__(self) -> None:
        mu = np.asarray(self.mu, dtype=float).copy()
        phi = np.asarray(self.phi, dtype=float).copy()
        if mu.shape != (5,) or phi.shape != (5,):
            raise ValueError("mu and phi must have length 5")
        if np.any(np.abs(phi) >= 1.0):
            raise ValueError("AR coefficients must satisfy |phi| < 1")
        mu.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "tau", float(self.tau))


def mean_filter(x, b, params: MeanParams) -> np.ndarray:
    """Innovations r, shape (T-1, 5), for weeks 2..T.

    The first week only provides the lag. ``b`` is the contemporaneous TB yield.
    """
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float)
    if x.shape[0] < 2:
        raise PanelError("mean filter needs at least 2 weeks")
    r = x[1:] - params.mu - params.phi * x[:-1]
    r[:, 4] -= params.tau * b[1:]
    return r


def mean_unfilter(r, params: MeanParams, x0, b) -> np.ndarray:
    """Rebuild spreads from innovations; returns (T, 5) with ``x0`` as row 0.

    ``b`` must have one entry per output row (its first entry is unused).
    """
    r = np.asarray(r, dtype=float)
    b = np.asarray(b, dtype=float)
    n = r.shape[0]
    if b.shape[0] != n + 1:
        raise ValueError("b must have len(r) + 1 entries")
    x = np.empty((n + 1, 5))
    x[0] = x0
    drift = np.broadcast_to(params.mu, (n, 5)).copy()
    drift[:, 4] += params.tau * b[1:]
    for t in range(n):
        x[t + 1] = drift[t] + params.phi * x[t] + r[t]
    return x
