"""Constrained minimal weighted-energy problems on point clouds."""

from ._equilib import *  # noqa: F401,F403
from ._equilib import __doc__  # noqa: F401

__version__ = "0.1.0"
