"""Explicit-state model checker for Concurrent State Machines.

The compiled extension provides the actual API; this package re-exports it.
When run from a build tree the extension may sit next to the sources rather
than inside the package, so fall back to a top-level import.
"""

try:
    from ._core import *  # noqa: F401,F403
    from . import _core as _impl
except ImportError:  # build-tree layout: _core.so on PYTHONPATH
    from _core import *  # noqa: F401,F403
    import _core as _impl

__doc__ = _impl.__doc__
__all__ = [name for name in dir(_impl) if not name.startswith("_")]
