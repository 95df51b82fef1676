"""Weighted-composition index sets.

Omega(k, n) = {(x_1, ..., x_k) : sum_j j*x_j = n} indexes every pmf
series in this package: x_j counts jumps of size j.
"""

import itertools


def enumerate_compositions(k, n):
    """Yield all (x_1, ..., x_k) with sum over j of j*x_j == n.

    Order is canonical and byte-stable: counts of the largest jump size
    increase first, so (k=2, n=2) yields (2, 0) then (0, 1).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if n < 0:
        raise ValueError("n must be non-negative")
    if k == 1:
        yield (n,)
        return
    for xk in range(n // k + 1):
        for head in enumerate_compositions(k - 1, n - k * xk):
            yield head + (xk,)


def joint_compositions(ks, ns):
    """Stream the cartesian product of Omega(k_i, n_i) over components.

    Per-component sets are materialized (they are the small factors);
    the joint product, which grows multiplicatively, is generated
    lazily.
    """
    if len(ks) != len(ns):
        raise ValueError("ks and ns must have equal length")
    per = [tuple(enumerate_compositions(k, n)) for k, n in zip(ks, ns)]
    return itertools.product(*per)
