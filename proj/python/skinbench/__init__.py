"""Skin detection toolkit and benchmark harness."""

from ._skinbench import *  # noqa: F401,F403
from ._skinbench import SkinbenchError, __doc__  # noqa: F401
