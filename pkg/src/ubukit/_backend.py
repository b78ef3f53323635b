"""Kernel backend selection.

Hot inner loops ship in two versions: numba-jitted kernels and pure-numpy
twins. The env var ``UBU_NUMBA`` picks the path: ``0``/``off``/``false``
forces numpy, anything else (or unset) uses numba when it imports. The flag
is read once at import time.
"""

import os

_FALSY = {"0", "off", "false", "no"}


def _probe_numba():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def numba_requested() -> bool:
    return os.environ.get("UBU_NUMBA", "").strip().lower() not in _FALSY


NUMBA_AVAILABLE = _probe_numba()
USE_NUMBA = numba_requested() and NUMBA_AVAILABLE


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
