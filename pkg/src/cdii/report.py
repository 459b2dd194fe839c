"""Reconstruction reports and error metrics."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import ScalarField, quad_weights


def relative_l2_error(reconstruction: ScalarField, truth: ScalarField) -> float:
    """Weighted relative L2 error; absolute error when the truth is zero."""
    if reconstruction.grid != truth.grid:
        raise ValueError("fields live on different grids")
    w = quad_weights(truth.grid)
    diff = float(np.sqrt(np.sum(w * (reconstruction.values - truth.values) ** 2)))
    denom = float(np.sqrt(np.sum(w * truth.values**2)))
    return diff / denom if denom > 0 else diff


def max_error(reconstruction: ScalarField, truth: ScalarField) -> float:
    return float(np.max(np.abs(reconstruction.values - truth.values)))


@dataclass
class ReconReport:
    """Everything needed to inspect and exactly re-run a reconstruction."""

    algorithm: str
    sigma: ScalarField
    history: list[dict]
    n_iter: int
    converged: bool
    wall_time: float
    config: dict = field(default_factory=dict)
    seed: int | None = None
    metrics: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def attach_truth(self, truth: ScalarField) -> None:
        self.metrics["relative_l2_error"] = relative_l2_error(self.sigma, truth)
        self.metrics["max_error"] = max_error(self.sigma, truth)

    def to_dict(self) -> dict:
        from . import __version__

        return {
            "algorithm": self.algorithm,
            "n_iter": self.n_iter,
            "converged": self.converged,
            "wall_time_s": self.wall_time,
            "grid_n_cells": self.sigma.grid.n_cells,
            "metrics": self.metrics,
            "history": self.history,
            "config": self.config,
            "seed": self.seed,
            "notes": self.notes,
            "version": __version__,
        }
