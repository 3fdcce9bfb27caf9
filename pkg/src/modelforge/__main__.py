"""Main entry point for the modelforge command."""

import logging
import sys

from modelforge.cli import run
from modelforge.config import get_config


def main() -> None:
    """Run the modelforge command line."""
    logging.basicConfig(
        level=getattr(logging, get_config().log_level, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
    )
    sys.exit(run())


if __name__ == "__main__":
    main()
