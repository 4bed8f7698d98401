from .evaluate import *  # noqa: F401,F403
from .nodes import *  # noqa: F401,F403
from .parser import *  # noqa: F401,F403
