"""Slow, independent reference computations used as test oracles."""

from functools import lru_cache


def matched_count(cand_units, ref_units):
    """Clipped overlap by pairing each candidate unit with an unused reference unit."""
    pool = list(ref_units)
    hits = 0
    for u in cand_units:
        if u in pool:
            pool.remove(u)
            hits += 1
    return hits


def prf(hits, n_cand, n_ref):
    p = hits / n_cand if n_cand else 0.0
    r = hits / n_ref if n_ref else 0.0
    return p, r, (2 * p * r / (p + r) if p + r else 0.0)


def ngram_list(tokens, n):
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def su_list(tokens, max_gap=4):
    units = [(t,) for t in tokens]
    for i in range(len(tokens)):
        for j in range(i + 1, len(tokens)):
            if j - i - 1 <= max_gap:
                units.append((tokens[i], tokens[j]))
    return units


def lcs_recursive(a, b):
    a, b = tuple(a), tuple(b)

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))

    return go(0, 0)
