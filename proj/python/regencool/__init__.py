from ._regencool import *  # noqa: F401,F403
from ._regencool import __version__  # noqa: F401
