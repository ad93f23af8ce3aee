"""Kernel backend selection.

The hot kernels (stencil derivatives, conservative flux divergences, and the
deterministic pairwise reduction) exist twice: a Cython extension compiled at
install time and a pure-numpy fallback.  The backend is chosen once at import
from the SURFCALC_BACKEND environment variable:

  auto      use the compiled extension if it imported, else numpy (default)
  compiled  require the extension, raise if missing
  numpy     force the fallback

Both backends implement identical arithmetic, including the reduction tree,
so a given scenario produces the same output bytes under either.
"""

import os

_choice = os.environ.get("SURFCALC_BACKEND", "auto")
if _choice not in ("auto", "compiled", "numpy"):
    raise ValueError(
        f"SURFCALC_BACKEND must be 'auto', 'compiled' or 'numpy', got {_choice!r}"
    )

if _choice == "numpy":
    from . import _numpy_impl as _impl
else:
    try:
        from . import _stencilc as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "compiled":
            raise
        from . import _numpy_impl as _impl

backend_name = "compiled" if _impl.__name__.endswith("_stencilc") else "numpy"

diff1 = _impl.diff1
compact_flux_div = _impl.compact_flux_div
pairwise_sum = _impl.pairwise_sum


def get_backend(name):
    """Return a specific backend module (used by tests and benchmarks)."""
    if name == "numpy":
        from . import _numpy_impl

        return _numpy_impl
    if name == "compiled":
        from . import _stencilc  # type: ignore[attr-defined]

        return _stencilc
    raise ValueError(f"unknown backend {name!r}")
