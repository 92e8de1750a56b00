import logging
import sys

from wassdim.cli.commands import run
from wassdim.cli.dependencies import get_settings

logger = logging.getLogger(__name__)


def main() -> None:
    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logger.info(f"Starting {settings.app_name} v{settings.app_version}")
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
