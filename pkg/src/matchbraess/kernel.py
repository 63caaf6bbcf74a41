"""Select the FCFS chain backend at import time.

The compiled ``_fcfs`` extension is used when it was built; otherwise the
pure-Python implementation takes over. Setting ``MATCHBRAESS_PURE=1`` forces
the fallback. Both backends consume identical arrival arrays and return
identical results.
"""

import os

from ._fcfs_py import FCFSChain as PyFCFSChain

try:
    if os.environ.get("MATCHBRAESS_PURE", "") not in ("", "0"):
        raise ImportError("pure backend requested")
    from ._fcfs import FCFSChain as CFCFSChain
except ImportError:
    CFCFSChain = None

FCFSChain = CFCFSChain if CFCFSChain is not None else PyFCFSChain
BACKEND = "cython" if CFCFSChain is not None else "python"
