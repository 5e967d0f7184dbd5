"""Self-similar machines, level graphs and domino tilesets.

Thin wrapper over the compiled extension; all data crosses the boundary as
plain dicts and lists mirroring the command line tool's JSON formats.
"""

try:
    from ._selfsim import *  # noqa: F401,F403  (installed package layout)
    from . import _selfsim as _impl
except ImportError:  # pragma: no cover - build-tree layout
    from _selfsim import *  # noqa: F401,F403
    import _selfsim as _impl

__version__ = "0.1.0"

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
