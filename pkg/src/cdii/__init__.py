"""Sparse log-conductivity reconstruction from interior current density data."""

__version__ = "0.1.0"

from .errors import CdiiError, ConfigError, LineSearchError, SolverError
from .grid import Grid, ScalarField, VectorField, quad_weights
from .objective import (
    BoxBounds,
    InverseProblem,
    Weights,
    interior_data,
    objective_gradient,
    objective_value,
)
from .pde import ConductivityOperator, gradient_field, solve_adjoint, solve_forward
from .phantoms import (
    Box,
    BoxFrame,
    Cardioid,
    Disk,
    Ellipse,
    NoiseSpec,
    Phantom,
    add_noise,
    generate_data,
    generate_data_pair,
    rasterize,
    test_case,
)
from .picard import PicardConfig, PicardResult, picard_run
from .vip import VipConfig, VipResult, soft_threshold, vip_run
from .report import ReconReport, max_error, relative_l2_error
from .fieldio import read_field, render_png, write_field
from .config import RunConfig, parse_config, parse_phantom
from .estimators import PicardReconstruction, VipReconstruction

__all__ = [
    "__version__",
    "CdiiError",
    "ConfigError",
    "LineSearchError",
    "SolverError",
    "Grid",
    "ScalarField",
    "VectorField",
    "quad_weights",
    "BoxBounds",
    "InverseProblem",
    "Weights",
    "interior_data",
    "objective_gradient",
    "objective_value",
    "ConductivityOperator",
    "gradient_field",
    "solve_adjoint",
    "solve_forward",
    "Box",
    "BoxFrame",
    "Cardioid",
    "Disk",
    "Ellipse",
    "NoiseSpec",
    "Phantom",
    "add_noise",
    "generate_data",
    "generate_data_pair",
    "rasterize",
    "test_case",
    "PicardConfig",
    "PicardResult",
    "picard_run",
    "VipConfig",
    "VipResult",
    "soft_threshold",
    "vip_run",
    "ReconReport",
    "max_error",
    "relative_l2_error",
    "read_field",
    "render_png",
    "write_field",
    "RunConfig",
    "parse_config",
    "parse_phantom",
    "PicardReconstruction",
    "VipReconstruction",
]
