"""
Configuration handler for fblab.
"""

import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from .errors import ConfigError
from .fbmin.descent import MinimizeConfig
from .plap.solver import SCHEMES, PLapConfig
from .verify.tolerances import TOLERANCES

# Load environment variables
load_dotenv()

DEFAULT_CONFIG_PATH = os.path.join(str(Path.home()), ".fblab", "config.yaml")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class GridConfig:
    """Computational box [-radius, radius]^2 with n cells per side."""
    n: int = 128
    radius: float = 4.0


@dataclass
class SolverConfig:
    """Inner p-Laplacian solver."""
    p: float = 2.0
    eps_reg: Optional[float] = None
    tol_rel_energy: float = 1e-9
    max_iter: int = 200
    scheme: str = "newton"
    eps_start: float = 1e-2


@dataclass
class DescentConfig:
    """Outer shape descent."""
    step_scale: float = 1.0
    tol_fb_residual: float = 0.1
    tol_energy_stall: float = 1e-4
    max_outer_iter: int = 100
    max_backtracks: int = 8
    smoothing_cells: float = 8.0
    clearance_cells: float = 2.0
    move_cap_cells: float = 2.0


@dataclass
class ProblemConfig:
    """The fixed body K and the starting domain, as shape specs."""
    k: str = "disk:1"
    init: str = "disk:3"


@dataclass
class LoggingConfig:
    """Logging configuration."""
    level: str = "INFO"
    file: Optional[str] = None
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


SECTIONS = {
    "grid": GridConfig,
    "solver": SolverConfig,
    "descent": DescentConfig,
    "problem": ProblemConfig,
    "logging": LoggingConfig,
}
SCALARS = {"output_dir": str, "seed": int, "threads": int, "deterministic": bool}
OPTIONAL_TYPES = {"solver.eps_reg": float, "logging.file": str}


def _section(name: str, cls, data: Any):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"section '{name}' must be a mapping", key=name)
    defaults = {f.name: getattr(cls(), f.name) for f in fields(cls)}
    values = {}
    for key, value in data.items():
        if key not in defaults:
            raise ConfigError(f"unknown configuration key '{name}.{key}'", key=f"{name}.{key}")
        kind = type(defaults[key]) if defaults[key] is not None else OPTIONAL_TYPES.get(f"{name}.{key}")
        if value is None or kind is None:
            values[key] = value
            continue
        try:
            values[key] = kind(value)
        except (TypeError, ValueError):
            raise ConfigError(f"'{name}.{key}' must be of type {kind.__name__}", key=f"{name}.{key}")
    return cls(**values)


@dataclass
class AppConfig:
    """Main application configuration."""
    grid: GridConfig = field(default_factory=GridConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    descent: DescentConfig = field(default_factory=DescentConfig)
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)
    output_dir: str = "output"
    seed: int = 0
    threads: int = 1
    deterministic: bool = True
    tolerances: Dict[str, float] = field(default_factory=dict)

    @staticmethod
    def resolve_path(config_path: Optional[str] = None) -> str:
        """Explicit path, else ``FBLAB_CONFIG``, else ``~/.fblab/config.yaml``."""
        return config_path or os.getenv("FBLAB_CONFIG") or DEFAULT_CONFIG_PATH

    @classmethod
    def load(cls, config_path: Optional[str] = None) -> "AppConfig":
        """Load configuration from a YAML file; a missing default file gives the defaults.

        Raises:
            ConfigError: If an explicitly named file is missing, or a key or value is invalid
        """
        path = cls.resolve_path(config_path)
        if not os.path.exists(path):
            if path != DEFAULT_CONFIG_PATH:
                raise ConfigError(f"configuration file not found: {path}", key="config")
            config = cls()
        else:
            with open(path, "r", encoding="utf-8") as f:
                try:
                    data = yaml.safe_load(f) or {}
                except yaml.YAMLError as e:
                    raise ConfigError(f"cannot parse {path}: {str(e)}", key="config")
            config = cls.from_dict(data)
        level = os.getenv("FBLAB_LOG_LEVEL")
        if level:
            config.logging.level = level.upper()
        config.validate()
        return config

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AppConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a mapping", key="config")
        for key in data:
            if key not in SECTIONS and key not in SCALARS and key != "tolerances":
                raise ConfigError(f"unknown configuration key '{key}'", key=key)
        sections = {name: _section(name, cls_, data.get(name)) for name, cls_ in SECTIONS.items()}
        scalars = {}
        for key, kind in SCALARS.items():
            if key in data:
                try:
                    scalars[key] = kind(data[key])
                except (TypeError, ValueError):
                    raise ConfigError(f"'{key}' must be of type {kind.__name__}", key=key)
        tolerances = data.get("tolerances") or {}
        if not isinstance(tolerances, dict):
            raise ConfigError("section 'tolerances' must be a mapping", key="tolerances")
        overrides = {}
        for name, value in tolerances.items():
            try:
                overrides[str(name)] = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"tolerance '{name}' must be a number", key=f"tolerances.{name}")
        config = cls(**sections, **scalars, tolerances=overrides)
        config.validate()
        return config

    def validate(self) -> None:
        """Check values before any computation.

        Raises:
            ConfigError: Naming the first offending key
        """
        checks = [
            ("solver.p", self.solver.p > 1, "must exceed 1"),
            ("grid.n", int(self.grid.n) >= 16, "must be at least 16"),
            ("grid.radius", self.grid.radius > 0, "must be positive"),
            ("solver.tol_rel_energy", self.solver.tol_rel_energy > 0, "must be positive"),
            ("solver.max_iter", int(self.solver.max_iter) >= 1, "must be at least 1"),
            ("solver.scheme", self.solver.scheme in SCHEMES, f"must be one of {SCHEMES}"),
            ("solver.eps_start", self.solver.eps_start > 0, "must be positive"),
            ("solver.eps_reg", self.solver.eps_reg is None or self.solver.eps_reg > 0, "must be positive"),
            ("descent.step_scale", self.descent.step_scale > 0, "must be positive"),
            ("descent.tol_fb_residual", self.descent.tol_fb_residual > 0, "must be positive"),
            ("descent.tol_energy_stall", self.descent.tol_energy_stall > 0, "must be positive"),
            ("descent.max_outer_iter", int(self.descent.max_outer_iter) >= 1, "must be at least 1"),
            ("descent.max_backtracks", int(self.descent.max_backtracks) >= 0, "must be nonnegative"),
            ("descent.smoothing_cells", self.descent.smoothing_cells > 0, "must be positive"),
            ("descent.clearance_cells", self.descent.clearance_cells > 0, "must be positive"),
            ("descent.move_cap_cells", self.descent.move_cap_cells > 0, "must be positive"),
            ("logging.level", str(self.logging.level).upper() in LOG_LEVELS, f"must be one of {LOG_LEVELS}"),
            ("threads", int(self.threads) >= 1, "must be at least 1"),
        ]
        for key, ok, message in checks:
            if not ok:
                raise ConfigError(f"'{key}' {message}", key=key)
        for name, value in self.tolerances.items():
            if name not in TOLERANCES:
                raise ConfigError(f"unknown tolerance '{name}'", key=f"tolerances.{name}")
            if not float(value) >= 0:
                raise ConfigError(f"tolerance '{name}' must be nonnegative", key=f"tolerances.{name}")

    def solver_config(self) -> PLapConfig:
        """Inner solver settings; deterministic runs replace the coloured sweep by the serial one."""
        settings = asdict(self.solver)
        if self.deterministic and settings["scheme"] == "colored-gs":
            settings["scheme"] = "lexicographic-gs"
        return PLapConfig(**settings)

    def minimize_config(self) -> MinimizeConfig:
        return MinimizeConfig(
            p=self.solver.p,
            n=self.grid.n,
            radius=self.grid.radius,
            k=self.problem.k,
            init=self.problem.init,
            seed=self.seed,
            solver=self.solver_config(),
            **asdict(self.descent),
        )

    def descent_overrides(self) -> Dict[str, Any]:
        """Descent settings as keyword overrides for the verification suites."""
        return asdict(self.descent)

    def to_dict(self) -> Dict[str, Any]:
        return {
            **{name: asdict(getattr(self, name)) for name in SECTIONS},
            "output_dir": self.output_dir,
            "seed": self.seed,
            "threads": self.threads,
            "deterministic": self.deterministic,
            "tolerances": dict(self.tolerances),
        }

    def save(self, config_path: Optional[str] = None) -> str:
        """Save configuration to a YAML file; returns the path written."""
        path = config_path or DEFAULT_CONFIG_PATH
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.to_dict(), f, default_flow_style=False, sort_keys=False)
        return path
