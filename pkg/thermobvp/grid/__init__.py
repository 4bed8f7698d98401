from .function import *  # noqa: F401,F403
from .mesh import *  # noqa: F401,F403
from .quadrature import *  # noqa: F401,F403
