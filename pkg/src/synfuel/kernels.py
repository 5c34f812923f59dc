"""Dispatch kernel backend selection.

The compiled extension is preferred; the pure-Python twin is the fallback.
Set SYNFUEL_FORCE_PY=1 to force the fallback (used by the benchmark and by
tests that compare the two backends).
"""

import os

if os.environ.get("SYNFUEL_FORCE_PY") == "1":
    from . import _py_core as _impl

    HAVE_COMPILED = False
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        HAVE_COMPILED = True
    except ImportError:
        from . import _py_core as _impl

        HAVE_COMPILED = False

solve_dispatch = _impl.solve_dispatch
BACKEND = "compiled" if HAVE_COMPILED else "python"
