"""Curve shortening flow laboratory: python bindings for the C++ core."""

from lmcflab._core import *  # noqa: F401,F403
from lmcflab._core import __version__  # noqa: F401
