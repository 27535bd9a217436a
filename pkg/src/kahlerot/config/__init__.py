"""
Configuration management for kahlerot.

Settings come from environment variables (prefix ``KAHLEROT_``) and an optional
``.env`` file. Logs are written under a configuration directory that is either
the production directory (~/.kahlerot), a development directory next to the
package, or whatever ``KAHLEROT_HOME`` points at.
"""

import os
from pathlib import Path

from ..constants import PROD_CONFIG_DIR, PROJECT_ROOT
from ._logging import setup_logging

DEV_CONFIG_DIR = PROJECT_ROOT / "data"


def is_dev_mode() -> bool:
    """Check environment variables to determine if in dev/testing mode."""
    dev_flag = os.environ.get("DEV", "false").lower() in ("true", "1", "t")
    testing_flag = os.environ.get("TESTING", "false").lower() in (
        "true",
        "1",
        "t",
    )
    return dev_flag or testing_flag


DEV_MODE = is_dev_mode()


def get_config_dir() -> Path:
    """Return the appropriate configuration directory based on the environment."""
    override = os.environ.get("KAHLEROT_HOME")
    if override:
        config_dir = Path(override).expanduser()
    elif DEV_MODE:
        config_dir = DEV_CONFIG_DIR
    else:
        config_dir = PROD_CONFIG_DIR
    config_dir.mkdir(parents=True, exist_ok=True)
    return config_dir


# Determine the active configuration directory ONCE on import.
CONFIG_DIR = get_config_dir()
ROOT_LOGGER = setup_logging(CONFIG_DIR / "logs")

from .model import AppConfig  # noqa: E402
