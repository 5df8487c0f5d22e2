"""Kernel backend selection.

Imports the compiled core when it is built, otherwise the NumPy fallback.
Set PFF_KERNELS=numpy (or =fast) to force a backend; forcing `fast` without
the extension built is an import error rather than a silent fallback.
"""

import os

_choice = os.environ.get("PFF_KERNELS", "auto")

if _choice == "numpy":
    from . import _numpy as _impl
elif _choice == "fast":
    from . import _fast as _impl  # type: ignore[no-redef]
elif _choice == "auto":
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _numpy as _impl
else:
    raise ImportError(f"PFF_KERNELS must be auto, fast or numpy, got {_choice!r}")

BACKEND = _impl.BACKEND
element_strains = _impl.element_strains
elastic_state = _impl.elastic_state
scatter_vertex = _impl.scatter_vertex
residual_u = _impl.residual_u
tangent_values = _impl.tangent_values
elastic_energy = _impl.elastic_energy
