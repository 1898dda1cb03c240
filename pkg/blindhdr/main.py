"""Console entrypoint."""

from __future__ import annotations

import logging
import sys

from blindhdr.cli import main
from blindhdr.utility.config import get_config


def run() -> None:
    """Configure logging from the environment and run the CLI."""
    level = logging.getLevelName(get_config().log_level)
    logging.basicConfig(
        level=level if isinstance(level, int) else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    sys.exit(main())


if __name__ == "__main__":
    run()
