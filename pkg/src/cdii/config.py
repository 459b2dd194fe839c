"""Flat key=value run configuration."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError
from .objective import BoxBounds, Weights
from .phantoms import Box, BoxFrame, Cardioid, Disk, Ellipse, Phantom, test_case
from .picard import PicardConfig
from .vip import VipConfig


@dataclass
class RunConfig:
    """Everything a pipeline run needs; defaults follow the experiments."""

    n_fine: int = 400
    n_coarse: int = 150
    test_case: int = 1
    phantom: str = ""  # inline phantom description; overrides test_case
    background: float = 0.0
    alpha1: float = 1.0
    alpha2: float = 1.0
    beta: float = 0.03
    gamma: float = 0.3
    delta: float = 0.01
    c_denoise: float = 0.001
    theta: float = 0.5
    c1: float = 1.9
    c2: float = 0.001
    n_backtrack: float = 2.0
    L0: float = 1.0
    tol: float = 1e-4
    max_iter: int = 20
    sigma_l: float = -4.0
    sigma_u: float = 4.0
    picard_max_iter: int = 20
    picard_tol: float = 1e-4
    picard_eps_grad: float = 1e-8
    noise: float = 0.0
    seed: int = 0
    algo: str = "vip"
    output_dir: str = "out"

    def weights(self) -> Weights:
        return Weights(self.alpha1, self.alpha2, self.beta, self.gamma, self.delta, self.c_denoise)

    def bounds(self) -> BoxBounds:
        return BoxBounds(self.sigma_l, self.sigma_u)

    def vip_config(self) -> VipConfig:
        return VipConfig(
            theta=self.theta,
            c1=self.c1,
            c2=self.c2,
            n_backtrack=self.n_backtrack,
            L0=self.L0,
            tol=self.tol,
            max_iter=self.max_iter,
            weights=self.weights(),
            bounds=self.bounds(),
        )

    def picard_config(self) -> PicardConfig:
        return PicardConfig(self.picard_max_iter, self.picard_tol, self.picard_eps_grad)

    def make_phantom(self) -> Phantom:
        if self.phantom:
            return parse_phantom(self.phantom, self.background)
        return test_case(self.test_case)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _validate(cfg: RunConfig) -> None:
    checks = [
        (cfg.n_fine > cfg.n_coarse >= 2, "n_fine must exceed n_coarse >= 2"),
        (0.0 <= cfg.theta < 1.0, "theta must be in [0, 1)"),
        (0.0 < cfg.c1 < 2.0, "c1 must be in (0, 2)"),
        (cfg.c2 > 0, "c2 must be > 0"),
        (cfg.n_backtrack > 1, "n_backtrack must be > 1"),
        (cfg.L0 > 0, "L0 must be > 0"),
        (cfg.tol > 0 and cfg.picard_tol > 0, "tolerances must be > 0"),
        (cfg.max_iter >= 1 and cfg.picard_max_iter >= 1, "iteration caps must be >= 1"),
        (min(cfg.alpha1, cfg.alpha2, cfg.beta, cfg.gamma, cfg.delta, cfg.c_denoise) >= 0,
         "weights must be >= 0"),
        (cfg.sigma_l < 0 < cfg.sigma_u, "bounds must satisfy sigma_l < 0 < sigma_u"),
        (cfg.noise >= 0, "noise level must be >= 0"),
        (cfg.algo in ("vip", "picard", "both"), "algo must be vip, picard, or both"),
        (bool(cfg.phantom) or cfg.test_case in (1, 2, 3, 4), "test_case must be 1..4"),
    ]
    for ok, msg in checks:
        if not ok:
            raise ConfigError(msg)


_SHAPE_PARSERS = {
    "disk": (Disk, 4),
    "ellipse": (Ellipse, 5),
    "box": (Box, 5),
    "frame": (None, 9),
    "cardioid": (Cardioid, 5),
}


def parse_phantom(text: str, background: float = 0.0) -> Phantom:
    """Parse 'type:v1,v2,...; type:...' into a phantom.

    Primitives: disk:cx,cy,r,value  ellipse:cx,cy,ax,ay,value
    box:x0,x1,y0,y1,value  frame:ox0,ox1,oy0,oy1,ix0,ix1,iy0,iy1,value
    cardioid:cx,cy,scale,angle,value
    """
    shapes = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            kind, rest = chunk.split(":", 1)
            kind = kind.strip().lower()
            params = [float(p) for p in rest.split(",")]
        except ValueError as exc:
            raise ConfigError(f"malformed phantom primitive {chunk!r}") from exc
        if kind not in _SHAPE_PARSERS:
            raise ConfigError(f"unknown phantom primitive {kind!r}")
        cls, arity = _SHAPE_PARSERS[kind]
        if len(params) != arity:
            raise ConfigError(f"{kind} expects {arity} numbers, got {len(params)}")
        if kind == "frame":
            shapes.append(BoxFrame(tuple(params[0:4]), tuple(params[4:8]), params[8]))
        else:
            shapes.append(cls(*params))
    if not shapes:
        raise ConfigError("phantom description contains no primitives")
    return Phantom(tuple(shapes), background)


def parse_config(path) -> RunConfig:
    """Parse a flat key=value file with '#' comments into a validated RunConfig."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    cfg = RunConfig()
    types = {f.name: f.type for f in fields(RunConfig)}
    for lineno, raw in enumerate(p.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in types:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        kind = types[key]
        try:
            if kind == "int":
                parsed = int(value)
            elif kind == "float":
                parsed = float(value)
                if not math.isfinite(parsed):
                    raise ValueError("non-finite")
            else:
                parsed = value
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc
        setattr(cfg, key, parsed)
    _validate(cfg)
    return cfg
