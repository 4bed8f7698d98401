from .config import *  # noqa: F401,F403
from .main import *  # noqa: F401,F403
from .plot import *  # noqa: F401,F403
