"""
Logger Setup Script
File: utils/logger.py

Logging for the h-deformation engine. This logger setup uses Loguru to log
messages both to a rotating file under the configured log folder and to the
console (stderr) at the configured level.

Import it from any module with:

    from utils.logger import logger
"""

# Imports from Python Standard Library
import pathlib
import sys

# Imports from external packages
from loguru import logger

# Imports from local modules
from utils.config import get_settings

# Define global constants
CURRENT_SCRIPT = pathlib.Path(__file__).stem  # Gets the current file name without the extension
SETTINGS = get_settings()
LOG_FOLDER: pathlib.Path = SETTINGS.log_dir  # Directory where logs will be stored
LOG_FILE: pathlib.Path = LOG_FOLDER.joinpath("project_log.log")  # Path to the log file

# Ensure the log folder exists or create it
LOG_FOLDER.mkdir(parents=True, exist_ok=True)

# Replace the default handler so the console level follows the settings
logger.remove()
logger.add(sys.stderr, level=SETTINGS.log_level)

# Configure Loguru to write to the log file
logger.add(LOG_FILE, level="DEBUG", rotation="5 MB", retention=3)


def main() -> None:
    """Show where log output goes."""
    logger.info(f"STARTING {CURRENT_SCRIPT}.py")
    logger.info(f"Console level: {SETTINGS.log_level}")
    logger.info(f"View the log output at {LOG_FILE}")
    logger.info(f"EXITING {CURRENT_SCRIPT}.py.")


# Conditional execution block that calls main() only when this file is executed directly
if __name__ == "__main__":
    main()
