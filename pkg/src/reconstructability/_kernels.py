"""Backend selection for the fitting kernel.

The compiled kernel is used when it imports; set ``RECONSTRUCTABILITY_PURE=1``
to force the numpy fallback.
"""

import os

from . import _ipf_py

BACKENDS = {"python": _ipf_py.ipf_fit}

try:
    from . import _ipf_cy
except ImportError:  # extension not built
    _ipf_cy = None
else:
    BACKENDS["cython"] = _ipf_cy.ipf_fit

if os.environ.get("RECONSTRUCTABILITY_PURE") or _ipf_cy is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

ipf_fit = BACKENDS[BACKEND]
