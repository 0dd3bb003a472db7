"""Stochastic model of follower response to advocate posts."""

from ._feedresp import *  # noqa: F401,F403
from ._feedresp import __version__  # noqa: F401
