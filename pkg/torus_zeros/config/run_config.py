import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Mapping

from torus_zeros.exceptions.validation import InvalidRangeException, UnknownSymbolException
from torus_zeros.models.moduli import Rectangle
from torus_zeros.utils.parsing import parse_grid, parse_region

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tolerances:
    """Every named tolerance of a run. All values must be positive."""

    # elliptic kernel
    min_im: float = 0.05
    theta_window: float = 4.0  # |Im z| <= theta_window * Im tau
    theta_tail: float = 1e-16
    lattice_eps: float = 1e-8
    wp_inverse: float = 1e-10
    legendre: float = 1e-11
    identity: float = 1e-10
    wp_ode: float = 1e-9
    derivative: float = 1e-8

    # moduli functions
    pole: float = 1e-14  # |denominator| below this * scale is a pole
    orbit_g2: float = 1e-8
    orbit_dedup: float = 1e-10
    lemma22: float = 1e-10
    lemma_witness: float = 1e-6

    # zero finder
    newton: float = 1e-10
    simple_floor: float = 1e-6
    boundary_dip: float = 1e-8
    winding_settle: float = 1e-3
    nudge_fraction: float = 0.01
    merge: float = 1e-8

    # cauchy differentiation
    cauchy_radius: float = 0.01
    cauchy_check: float = 1e-9

    # painleve lab
    pole_skip: float = 1e-6
    riccati0: float = 1e-8
    riccati1: float = 1e-7
    hamilton: float = 1e-6
    pvi: float = 1e-5
    okamoto: float = 1e-9
    mu_formula: float = 1e-7

    # green hessian
    hessian: float = 1e-9
    sz15: float = 1e-9
    fd_hessian_step: float = 1e-5
    fd_hessian: float = 1e-4

    # curve tracer
    curve_residual: float = 1e-8
    smooth_floor: float = 1e-6
    fd_step: float = 1e-6
    refine_tol: float = 1e-13
    gradient_check: float = 1e-4
    disjoint_cells: float = 10.0
    curve_det: float = 1e-7

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise InvalidRangeException(field=f"tol.{f.name}", value=value, min_value=0)

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def with_overrides(self, overrides: Mapping[str, float] | None) -> "Tolerances":
        """
        Copy with some tolerances replaced.

        Unknown names are rejected rather than ignored so that a typo on the
        command line cannot silently run with the default.
        """
        if not overrides:
            return self
        known = set(self.names())
        for name in overrides:
            if name not in known:
                raise UnknownSymbolException(symbol=name, known=known, kind="tolerance")
        return replace(self, **{k: float(v) for k, v in overrides.items()})

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class RunConfig:
    """Configuration for one run of the library or the CLI."""

    region: Rectangle = field(default_factory=lambda: Rectangle(-1.0, 1.0, 0.1, 3.0))
    grid: tuple[int, int] = (400, 400)
    tolerances: Tolerances = field(default_factory=Tolerances)
    series_depth: int = 64
    thread_count: int = 4
    output_dir: Path = Path("out")
    log_dir: Path = Path("logs")
    seed: int = 20240917

    # iteration limits
    newton_max_iter: int = 60
    max_depth: int = 14
    max_nudges: int = 5
    cauchy_nodes: int = 64
    quadrature_nodes: int = 16
    orbit_height: int = 6

    # sample sizes of the verification suites
    identity_samples: int = 200
    derivative_samples: int = 50
    path_points: int = 40
    c_samples: int = 10
    okamoto_samples: int = 100
    hessian_samples: int = 100

    def __post_init__(self):
        for name in (
            "series_depth",
            "thread_count",
            "newton_max_iter",
            "max_depth",
            "cauchy_nodes",
            "quadrature_nodes",
            "orbit_height",
            "identity_samples",
            "derivative_samples",
            "path_points",
            "c_samples",
            "okamoto_samples",
            "hessian_samples",
        ):
            if getattr(self, name) < 1:
                raise InvalidRangeException(field=name, value=getattr(self, name), min_value=1)
        nx, ny = self.grid
        if nx < 16 or ny < 16:
            raise InvalidRangeException(field="grid", value=f"{nx}x{ny}", min_value=16)

    @classmethod
    def from_env(cls, prefix: str = "TORUS_ZEROS") -> "RunConfig":
        """
        Create configuration from environment variables.

        Only the variables that are set override the defaults.

        Args:
            prefix: Environment variable prefix (default: TORUS_ZEROS)
        """
        overrides = {}

        if os.getenv(f"{prefix}_THREADS"):
            overrides["thread_count"] = int(os.getenv(f"{prefix}_THREADS"))
        if os.getenv(f"{prefix}_SEED"):
            overrides["seed"] = int(os.getenv(f"{prefix}_SEED"))
        if os.getenv(f"{prefix}_SERIES_DEPTH"):
            overrides["series_depth"] = int(os.getenv(f"{prefix}_SERIES_DEPTH"))
        if os.getenv(f"{prefix}_OUTPUT_DIR"):
            overrides["output_dir"] = Path(os.getenv(f"{prefix}_OUTPUT_DIR"))
        if os.getenv(f"{prefix}_LOG_DIR"):
            overrides["log_dir"] = Path(os.getenv(f"{prefix}_LOG_DIR"))
        if os.getenv(f"{prefix}_REGION"):
            overrides["region"] = parse_region(os.getenv(f"{prefix}_REGION"))
        if os.getenv(f"{prefix}_GRID"):
            overrides["grid"] = parse_grid(os.getenv(f"{prefix}_GRID"))

        return cls(**overrides)

    @classmethod
    def for_testing(cls, **overrides) -> "RunConfig":
        """
        Create configuration with small grids and samples.

        Example:
            config = RunConfig.for_testing(
                identity_samples=10,
                grid=(32, 32),
            )
        """
        defaults = {
            "grid": (48, 48),
            "thread_count": 2,
            "seed": 7,
            "identity_samples": 20,
            "derivative_samples": 5,
            "path_points": 8,
            "c_samples": 2,
            "okamoto_samples": 10,
            "hessian_samples": 10,
            "output_dir": Path("out") / "test",
        }
        defaults.update(overrides)
        return cls(**defaults)

    def with_tolerances(self, overrides: Mapping[str, float] | None) -> "RunConfig":
        return replace(self, tolerances=self.tolerances.with_overrides(overrides))

    def to_dict(self) -> dict:
        """Every effective setting, defaults included."""
        return {
            "region": self.region.to_dict(),
            "grid": list(self.grid),
            "tolerances": self.tolerances.to_dict(),
            "series_depth": self.series_depth,
            "thread_count": self.thread_count,
            "output_dir": str(self.output_dir),
            "log_dir": str(self.log_dir),
            "seed": self.seed,
            "newton_max_iter": self.newton_max_iter,
            "max_depth": self.max_depth,
            "max_nudges": self.max_nudges,
            "cauchy_nodes": self.cauchy_nodes,
            "quadrature_nodes": self.quadrature_nodes,
            "orbit_height": self.orbit_height,
            "identity_samples": self.identity_samples,
            "derivative_samples": self.derivative_samples,
            "path_points": self.path_points,
            "c_samples": self.c_samples,
            "okamoto_samples": self.okamoto_samples,
            "hessian_samples": self.hessian_samples,
        }


_config: RunConfig | None = None


def init_run_config(config: RunConfig | None = None, **kwargs) -> RunConfig:
    """
    Initialise the global run configuration.

    Args:
        config: RunConfig object
        **kwargs: Individual fields (alternative to config)

    Returns:
        The active configuration
    """
    global _config

    if _config is not None:
        logger.warning("Run configuration already initialised, replacing it")

    _config = config if config is not None else RunConfig(**kwargs)
    logger.debug(f"Run configuration initialised: seed={_config.seed}, threads={_config.thread_count}")
    return _config


def get_run_config() -> RunConfig:
    global _config

    # library use without the CLI gets the documented defaults
    if _config is None:
        _config = RunConfig()
    return _config


def reset_run_config():
    global _config
    _config = None
