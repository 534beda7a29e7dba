"""Hot kernels, compiled when available.

``BACKEND`` is ``"compiled"`` when the Cython extension imported and
``"python"`` otherwise. Set ``HYDROQ_PURE_PYTHON=1`` to force the NumPy
fallback.
"""

import os

from . import _fallback

_compiled = None
if os.environ.get("HYDROQ_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

_impl = _compiled if _compiled is not None else _fallback
BACKEND = "compiled" if _compiled is not None else "python"

apply_1q = _impl.apply_1q
apply_cnot = _impl.apply_cnot
apply_cz = _impl.apply_cz
apply_phase_rows = _impl.apply_phase_rows
sa_anneal = _impl.sa_anneal


def backends():
    """Return ``{name: module}`` for every importable backend."""
    found = {"python": _fallback}
    if _compiled is not None:
        found["compiled"] = _compiled
    else:
        try:
            from . import _kernels as compiled
        except ImportError:
            pass
        else:
            found["compiled"] = compiled
    return found
