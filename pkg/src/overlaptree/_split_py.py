"""Pure-numpy split-scan kernel.

Mirrors the compiled kernel in ``_split_cy.pyx`` operation for operation so
both produce bit-identical split choices. Any change here must be made in
the .pyx twin as well.
"""

import numpy as np

GINI = 0
ENTROPY = 1

_NEG_INF = float("-inf")


def _impurity_arr(criterion, n, n1):
    # n, n1 are int64 arrays; pure nodes are exactly 0.0 in both kernels.
    # Proportions come from their own counts and gini is the product form,
    # keeping the scan exactly symmetric in the group labels.
    p0 = (n - n1) / n
    p1 = n1 / n
    pure = (n1 == 0) | (n1 == n)
    if criterion == GINI:
        h = 2.0 * p0 * p1
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            h = -(p0 * np.log2(p0) + p1 * np.log2(p1))
    return np.where(pure, 0.0, h)


def scan_split(values, labels, min_leaf, criterion, parent_impurity):
    """Best split position of a sorted 1-D feature.

    Parameters
    ----------
    values : float64 array, ascending
    labels : int8 array aligned with ``values``, entries in {0, 1}
    min_leaf : minimum samples required on each side
    criterion : GINI or ENTROPY
    parent_impurity : impurity of the unsplit node

    Returns
    -------
    (delta, pos) where ``pos`` splits between sorted indices pos and pos+1
    and ``delta`` is the weighted impurity decrease, or (-inf, -1) when no
    admissible position exists. Ties resolve to the lowest position.
    """
    n = values.shape[0]
    if n < 2:
        return _NEG_INF, -1
    nL = np.arange(1, n, dtype=np.int64)
    nR = np.int64(n) - nL
    n1L = np.cumsum(labels[:-1], dtype=np.int64)
    n1R = np.int64(labels.sum(dtype=np.int64)) - n1L
    valid = (values[:-1] < values[1:]) & (nL >= min_leaf) & (nR >= min_leaf)
    if not valid.any():
        return _NEG_INF, -1
    hl = _impurity_arr(criterion, nL, n1L)
    hr = _impurity_arr(criterion, nR, n1R)
    nd = float(n)
    delta = parent_impurity - (nL / nd) * hl - (nR / nd) * hr
    delta = np.where(valid, delta, _NEG_INF)
    pos = int(np.argmax(delta))
    return float(delta[pos]), pos
