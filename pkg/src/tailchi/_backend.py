"""Census backend selection.

The clique census has two interchangeable implementations: a Cython extension
(tailchi._kernels) and a numpy fallback (tailchi._kernels_py).  The compiled
one is preferred when importable.  TAILCHI_BACKEND=pure or =compiled forces
the choice; forcing "compiled" when the extension is missing raises at import
so a silent slowdown cannot masquerade as the fast path.

Both backends are importable side by side (the benchmark and the parity tests
do exactly that); this module only decides which one the library routines use.
"""

import os

from . import _kernels_py

_forced = os.environ.get("TAILCHI_BACKEND", "").strip().lower()

if _forced == "pure":
    _impl = _kernels_py
    BACKEND = "pure"
elif _forced == "compiled":
    from . import _kernels as _impl  # ImportError here is deliberate

    BACKEND = "compiled"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "pure"

rips_census = _impl.rips_census
