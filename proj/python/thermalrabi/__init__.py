"""Two-level trapped-ion qubit under a thermally fluctuating Rabi frequency.

Thin re-export of the compiled core. Installed wheels place _core inside
this package; in-tree builds put it on sys.path directly, hence the
fallback import.
"""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:  # pragma: no cover
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
