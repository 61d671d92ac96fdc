"""Value bundles shared by every module: points of the phase space and of
the displaced (d'Alembert) phase space."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _as_vector(x, name: str) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries: {v}")
    return v


@dataclass(frozen=True)
class PhaseState:
    """A point (q, q̇, t) of the tangent bundle of configuration space."""

    q: np.ndarray
    qd: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "q", _as_vector(self.q, "q"))
        object.__setattr__(self, "qd", _as_vector(self.qd, "qd"))
        object.__setattr__(self, "t", float(self.t))
        if self.q.shape != self.qd.shape:
            raise ValueError("q and qd must have the same length")

    @property
    def n(self) -> int:
        return self.q.shape[0]


@dataclass(frozen=True)
class DAlembertState:
    """A point (q, ε, q̇, ε̇, t) of the displaced phase space: configuration
    plus the virtual displacement ε joining two nearby solutions."""

    q: np.ndarray
    eps: np.ndarray
    qd: np.ndarray
    epsd: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("q", "eps", "qd", "epsd"):
            object.__setattr__(self, name, _as_vector(getattr(self, name), name))
        object.__setattr__(self, "t", float(self.t))
        n = self.q.shape[0]
        for name in ("eps", "qd", "epsd"):
            if getattr(self, name).shape[0] != n:
                raise ValueError(f"{name} must have length {n}")

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def phase(self) -> PhaseState:
        return PhaseState(self.q, self.qd, self.t)
