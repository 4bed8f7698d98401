from .cone import *  # noqa: F401,F403
from .dataclasses import *  # noqa: F401,F403
from .exceptions import *  # noqa: F401,F403
from .expr import *  # noqa: F401,F403
from .geometry import *  # noqa: F401,F403
from .grid import *  # noqa: F401,F403
from .hypothesis import *  # noqa: F401,F403
from .operator import *  # noqa: F401,F403
from .problems import *  # noqa: F401,F403
from .solver import *  # noqa: F401,F403
