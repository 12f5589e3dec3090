import logging
import os

from dotenv import load_dotenv

from torus_zeros.cli.commands import cli
from torus_zeros.config.run_config import RunConfig
from torus_zeros.utils.logger import setup_logging

load_dotenv()
logger = logging.getLogger(__name__)


def setup_app():
    # log_dir comes from the environment; subcommand options only bind seed and threads later
    logger_level = os.getenv("LOG_LEVEL", "INFO").upper()
    console_output = os.getenv("LOG_CONSOLE", "false").lower() == "true"
    setup_logging(RunConfig.from_env(), log_level=logger_level, console_output=console_output)


if __name__ == "__main__":
    setup_app()

    try:
        cli()

    except KeyboardInterrupt:
        logger.error("Received keyboard interrupt, shutting down...")
        raise

    except Exception as e:
        logger.error(f"An unexpected error occurred: {e}", exc_info=True)
        raise
