"""Pure numpy implementations of the hot kernels.

These are the reference versions; the compiled module must agree with them
exactly (same tie-breaking, same cluster labels).
"""
import numpy as np


def average_ranks(values):
    """Column-wise fractional ranks (1-based, ties get the mean of their span)."""
    values = np.asarray(values, dtype=np.float64)
    n, m = values.shape
    out = np.empty((n, m), dtype=np.float64)
    for j in range(m):
        col = values[:, j]
        order = np.argsort(col, kind="stable")
        srt = col[order]
        new_group = np.empty(n, dtype=bool)
        new_group[0] = True
        new_group[1:] = srt[1:] != srt[:-1]
        starts = np.flatnonzero(new_group)
        ends = np.append(starts[1:], n)
        group = np.cumsum(new_group) - 1
        out[order, j] = ((starts + 1 + ends) / 2.0)[group]
    return out


def _sqdist(points, rem, ref):
    diff = points[rem] - ref
    return (diff * diff).sum(axis=1)


def _take_cluster(points, rem, pos, k):
    # k nearest to rem[pos], the seed itself always first; ties by row index
    d = _sqdist(points, rem, points[rem[pos]])
    d[pos] = -1.0
    chosen = np.argsort(d, kind="stable")[:k]
    keep = np.ones(len(rem), dtype=bool)
    keep[chosen] = False
    return rem[chosen], rem[keep]


def mdav_labels(points, k):
    """Cluster labels from MDAV fixed-size microaggregation.

    ``points`` is an (n, m) float array (already scaled); returns an int64
    array of cluster ids numbered in order of formation.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    n = points.shape[0]
    k = int(k)
    labels = np.full(n, -1, dtype=np.int64)
    rem = np.arange(n, dtype=np.int64)
    cid = 0
    while len(rem) >= 3 * k:
        centroid = points[rem].mean(axis=0)
        r = int(np.argmax(_sqdist(points, rem, centroid)))
        r_point = points[rem[r]].copy()
        members, rem = _take_cluster(points, rem, r, k)
        labels[members] = cid
        cid += 1
        s = int(np.argmax(_sqdist(points, rem, r_point)))
        members, rem = _take_cluster(points, rem, s, k)
        labels[members] = cid
        cid += 1
    if len(rem) >= 2 * k:
        centroid = points[rem].mean(axis=0)
        r = int(np.argmax(_sqdist(points, rem, centroid)))
        members, rem = _take_cluster(points, rem, r, k)
        labels[members] = cid
        cid += 1
    if len(rem):
        labels[rem] = cid
    return labels
