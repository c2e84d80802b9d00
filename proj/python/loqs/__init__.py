"""Python interface to the linear-optics gate simulator."""

try:
    from ._loqs import *  # noqa: F401,F403  (installed layout)
    from ._loqs import __doc__  # noqa: F401
except ImportError:
    from _loqs import *  # noqa: F401,F403  (build-tree layout)
    from _loqs import __doc__  # noqa: F401
