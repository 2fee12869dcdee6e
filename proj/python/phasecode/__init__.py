"""Split-detector phase-front coding toolkit."""

from ._phasecode import *  # noqa: F401,F403
from ._phasecode import __version__  # noqa: F401
