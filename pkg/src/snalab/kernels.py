"""Kernel selection: compiled extension when available, pure Python otherwise.

Set SNALAB_PURE=1 to force the pure-Python reference kernels (used by the
benchmark and the equivalence tests).
"""

import os

from . import _kernels_ref as pure

if os.environ.get("SNALAB_PURE"):
    impl = pure
    COMPILED = False
else:
    try:
        from . import _kernels as impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        impl = pure
        COMPILED = False

IMPLEMENTATION = "compiled" if COMPILED else "pure-python"

orbit_reduce = impl.orbit_reduce
orbit_fill = impl.orbit_fill
orbit_hist = impl.orbit_hist
orbit_back_reduce = impl.orbit_back_reduce
orbit_back_hist = impl.orbit_back_hist
probe_lift = impl.probe_lift
cocycle_norm_logsum = impl.cocycle_norm_logsum
cocycle_pair_logs = impl.cocycle_pair_logs

CK_ROT = pure.CK_ROT
CK_DIAGROT = pure.CK_DIAGROT
CK_CONST = pure.CK_CONST
CK_SCHRO = pure.CK_SCHRO
