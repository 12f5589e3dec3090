"""
Logging for command line runs.

Every record passing the handlers is stamped with the seed and thread
count of the run it belongs to, so a log line can be matched with the
JSON report of the same run. stdout carries the reports; log lines go to
files under RunConfig.log_dir and, when asked, to stderr.
"""

import logging
import sys
from logging.handlers import RotatingFileHandler

from torus_zeros.config.run_config import RunConfig, Tolerances

APP_NAME = "torus_zeros"
LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(command)s seed=%(seed)s threads=%(threads)s | %(threadName)s | %(name)s:%(lineno)d | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_MAX_BYTES = 10 * 1024 * 1024
# font discovery and the thread pool log at DEBUG on every run
_QUIET = ("concurrent.futures", "matplotlib", "PIL")


class RunContextFilter(logging.Filter):
    """Adds seed, threads and command attributes from the bound run."""

    def __init__(self):
        super().__init__()
        self.seed = "-"
        self.threads = "-"
        self.command = "-"

    def bind(self, config: RunConfig, command: str | None = None):
        self.seed = config.seed
        self.threads = config.thread_count
        self.command = command or "-"

    def filter(self, record: logging.LogRecord) -> bool:
        record.seed = self.seed
        record.threads = self.threads
        record.command = self.command
        return True


run_context = RunContextFilter()


def _file_handler(path, level: int, backups: int, formatter: logging.Formatter) -> RotatingFileHandler:
    handler = RotatingFileHandler(filename=path, maxBytes=_MAX_BYTES, backupCount=backups, encoding="utf-8")
    handler.setLevel(level)
    handler.setFormatter(formatter)
    handler.addFilter(run_context)
    return handler


def setup_logging(config: RunConfig, log_level: str = "INFO", console_output: bool = False) -> list[logging.Handler]:
    """
    Configure the root logger for a run with config.

    Writes <log_dir>/torus_zeros.log and <log_dir>/torus_zeros_errors.log,
    plus stderr when console_output is set. Existing root handlers are
    replaced. Returns the installed handlers.
    """
    log_dir = config.log_dir
    log_dir.mkdir(parents=True, exist_ok=True)
    level = getattr(logging, log_level.upper(), logging.INFO)
    run_context.bind(config)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)
    handlers: list[logging.Handler] = [
        _file_handler(log_dir / f"{APP_NAME}.log", level, 5, formatter),
        _file_handler(log_dir / f"{APP_NAME}_errors.log", logging.ERROR, 10, formatter),
    ]
    if console_output:
        console = logging.StreamHandler(sys.stderr)
        console.setLevel(level)
        console.setFormatter(formatter)
        console.addFilter(run_context)
        handlers.append(console)
    for handler in handlers:
        root_logger.addHandler(handler)

    for name in _QUIET:
        logging.getLogger(name).setLevel(logging.WARNING)

    logging.getLogger(__name__).info(
        f"logging at {logging.getLevelName(level)} to {log_dir} (stderr: {console_output})"
    )
    return handlers


def bind_run(config: RunConfig, command: str):
    """Stamp later records with this run and log its effective settings once."""
    run_context.bind(config, command)
    logger = logging.getLogger(__name__)
    logger.info(
        f"run {command}: region {config.region}, grid {config.grid[0]}x{config.grid[1]}, "
        f"series depth {config.series_depth}, output {config.output_dir}"
    )
    defaults = Tolerances().to_dict()
    overridden = {name: value for name, value in config.tolerances.to_dict().items() if value != defaults[name]}
    if overridden:
        logger.info(f"run {command}: tolerance overrides {overridden}")
