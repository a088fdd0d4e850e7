"""Partition agreement scores."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ContractError
from .graph import Partition


def contingency(x: Partition, y: Partition) -> np.ndarray:
    if x.nodes() != y.nodes():
        raise ContractError(
            f"partitions cover different node sets ({len(x.nodes() ^ y.nodes())} nodes differ)"
        )
    nodes = list(x.assignment)
    _, xi = np.unique([x[v] for v in nodes], return_inverse=True)
    _, yi = np.unique([y[v] for v in nodes], return_inverse=True)
    table = np.zeros((xi.max() + 1, yi.max() + 1), dtype=np.int64)
    np.add.at(table, (xi, yi), 1)
    return table


# Logs are taken of exact integer ratios and summed with fsum, so equal
# count multisets give bit-identical entropies (nmi(x, x) == 1.0 exactly).
def _entropy(counts, n: int) -> float:
    return math.fsum(c / n * math.log(n / c) for c in counts if c > 0)


def nmi(x: Partition, y: Partition) -> float:
    """``2 I(X;Y) / (H(X) + H(Y))`` in nats.

    When both partitions put everything in one community the ratio is 0/0;
    that case returns 1.
    """
    table = contingency(x, y)
    n = int(table.sum())
    rows = [int(v) for v in table.sum(axis=1)]
    cols = [int(v) for v in table.sum(axis=0)]
    hx, hy = _entropy(rows, n), _entropy(cols, n)
    if hx + hy == 0.0:
        return 1.0
    mi = math.fsum(
        int(c) / n * math.log(n * int(c) / (rows[i] * cols[j]))
        for (i, j), c in np.ndenumerate(table)
        if c > 0
    )
    return min(max(2.0 * mi / (hx + hy), 0.0), 1.0)


def _pairs(k) -> int:
    k = int(k)
    return k * (k - 1) // 2


def ari(x: Partition, y: Partition) -> float:
    """Adjusted Rand index under the fixed-marginals permutation model."""
    table = contingency(x, y)
    n = int(table.sum())
    sum_ij = sum(_pairs(c) for c in table.ravel())
    sum_a = sum(_pairs(c) for c in table.sum(axis=1))
    sum_b = sum(_pairs(c) for c in table.sum(axis=0))
    total = _pairs(n)
    # (index - expected) / (max - expected), scaled by 2*total to stay integral
    num = 2 * sum_ij * total - 2 * sum_a * sum_b
    den = (sum_a + sum_b) * total - 2 * sum_a * sum_b
    if den == 0:
        return 1.0 if x.same_as(y) else 0.0
    return num / den
