"""Python bindings for the posteval C++ core."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, PostevalError  # noqa: F401
