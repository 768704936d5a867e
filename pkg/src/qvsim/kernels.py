"""Kernel backend selection.

The compiled extension is preferred when present; the pure-numpy fallback
has identical semantics.  Set ``QVSIM_KERNELS=py`` or ``=cy`` to force a
backend (``cy`` raises if the extension is missing).
"""

import os

_choice = os.environ.get("QVSIM_KERNELS", "").lower()

if _choice == "py":
    from . import _kernels_py as _impl
elif _choice == "cy":
    from . import _kernels_cy as _impl  # type: ignore[no-redef]
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

BACKEND = _impl.BACKEND
apply_unitary = _impl.apply_unitary
apply_permphase = _impl.apply_permphase
subsystem_probs = _impl.subsystem_probs
collapse = _impl.collapse
