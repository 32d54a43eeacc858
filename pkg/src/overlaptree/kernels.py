"""Split-kernel selection.

The compiled extension is preferred when it was built; otherwise the numpy
fallback takes over. Set OVERLAPTREE_PURE_PYTHON=1 to force the fallback.
Both kernels implement the same contract (see ``_split_py.scan_split``) and
are kept arithmetic-identical; ``benchmarks/bench_kernels.py`` compares
their speed.
"""

import os

from . import _split_py

GINI = _split_py.GINI
ENTROPY = _split_py.ENTROPY
CRITERION_IDS = {"gini": GINI, "entropy": ENTROPY}

scan_split_python = _split_py.scan_split
scan_split_cython = None

if not os.environ.get("OVERLAPTREE_PURE_PYTHON"):
    try:
        from . import _split_cy

        scan_split_cython = _split_cy.scan_split
    except ImportError:
        pass

if scan_split_cython is not None:
    scan_split = scan_split_cython
    ACTIVE = "cython"
else:
    scan_split = scan_split_python
    ACTIVE = "python"
