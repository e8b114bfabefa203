"""Select the jet kernel at import: compiled extension or numpy fallback.

``TORSIONLAB_BACKEND=python`` forces the fallback, ``=compiled`` insists on
the extension (ImportError if it was not built). Default: compiled if
available, else fallback.
"""

import os

_requested = os.environ.get("TORSIONLAB_BACKEND", "").strip().lower()

if _requested == "python":
    from . import _jetkern_py as _impl

    BACKEND = "python"
elif _requested == "compiled":
    from . import _jetkern as _impl

    BACKEND = "compiled"
elif _requested == "":
    try:
        from . import _jetkern as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _jetkern_py as _impl

        BACKEND = "python"
else:
    raise RuntimeError(f"TORSIONLAB_BACKEND must be 'python' or 'compiled', got {_requested!r}")

eval_tape = _impl.eval_tape


def load_backend(name):
    """Return a specific backend's eval_tape (used by the benchmark and tests)."""
    if name == "python":
        from . import _jetkern_py

        return _jetkern_py.eval_tape
    if name == "compiled":
        from . import _jetkern

        return _jetkern.eval_tape
    raise ValueError(f"unknown backend {name!r}")
