import logging
import subprocess
from functools import lru_cache
from pathlib import Path

from app import __version__

logger = logging.getLogger(__name__)


@lru_cache(maxsize=1)
def describe_version() -> str:
    """`git describe` of the checkout, or the package version outside git."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parents[2],
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError) as e:
        logger.debug(f"git describe unavailable: {e}")
    return __version__
