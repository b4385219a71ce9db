"""Definition-direct oracles, independent of the package implementations.

Everything here works from a dense adjacency matrix or plain dict loops so
the optimized CSR/numba paths can be checked against first principles.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def adjacency_matrix(g) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=np.int64)
    for u, v, w in g.edge_list():
        a[u, v] = w
        a[v, u] = w
    return a


def density_oracle(g) -> float:
    a = adjacency_matrix(g) > 0
    m = a.sum() // 2
    return 2.0 * m / (g.n * (g.n - 1))


def avg_degree_oracle(g) -> float:
    a = adjacency_matrix(g) > 0
    return a.sum() / g.n


def clustering_oracle(g) -> float:
    """Mean of 2*T(v)/(deg(v)(deg(v)-1)) with T(v) from brute-force triples."""
    a = adjacency_matrix(g) > 0
    total = 0.0
    for v in range(g.n):
        nbrs = np.flatnonzero(a[v])
        d = len(nbrs)
        if d < 2:
            continue
        t = 0
        for i in range(d):
            for j in range(i + 1, d):
                if a[nbrs[i], nbrs[j]]:
                    t += 1
        total += 2.0 * t / (d * (d - 1))
    return total / g.n


def s_metric_oracle(g) -> float:
    a = adjacency_matrix(g) > 0
    deg = a.sum(axis=1)
    total = 0
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if a[u, v]:
                total += deg[u] * deg[v]
    return float(total)


def sample_discrete_power_law(alpha: float, size: int, seed: int, kmax: int = 10**6) -> np.ndarray:
    """Inverse-CDF samples from P(k) proportional to k^-alpha, k >= 1."""
    ks = np.arange(1, kmax + 1, dtype=np.float64)
    pmf = ks ** (-alpha)
    cdf = np.cumsum(pmf / pmf.sum())
    u = np.random.default_rng(seed).random(size)
    return np.searchsorted(cdf, u) + 1


def betweenness_oracle(g) -> np.ndarray:
    """All-pairs shortest-path enumeration: distances by BFS-free dynamic
    programming over the adjacency matrix, path counts by distance layers,
    dependency by the pair formula (unordered pairs, endpoints excluded)."""
    n = g.n
    a = adjacency_matrix(g) > 0
    inf = math.inf
    dist = np.full((n, n), inf)
    for v in range(n):
        dist[v, v] = 0
    for u in range(n):
        for v in range(n):
            if a[u, v]:
                dist[u, v] = 1
    for k in range(n):  # Floyd-Warshall
        for i in range(n):
            for j in range(n):
                if dist[i, k] + dist[k, j] < dist[i, j]:
                    dist[i, j] = dist[i, k] + dist[k, j]
    sigma = np.zeros((n, n))
    for s in range(n):
        sigma[s, s] = 1
        order = sorted(range(n), key=lambda t: dist[s, t])
        for t in order:
            if t == s or dist[s, t] == inf:
                continue
            cnt = 0
            for p in range(n):
                if a[p, t] and dist[s, p] == dist[s, t] - 1:
                    cnt += sigma[s, p]
            sigma[s, t] = cnt
    bet = np.zeros(n)
    for s in range(n):
        for t in range(s + 1, n):
            if dist[s, t] == inf or sigma[s, t] == 0:
                continue
            for v in range(n):
                if v in (s, t):
                    continue
                if dist[s, v] + dist[v, t] == dist[s, t]:
                    bet[v] += sigma[s, v] * sigma[v, t] / sigma[s, t]
    return bet


def naive_multiplexity(labelings) -> dict[tuple[str, str], int]:
    """All-pairs same-label month counts over every user ever labeled."""
    counts: dict[tuple[str, str], int] = {}
    for monthly in labelings:
        users = sorted(monthly)
        for u, v in itertools.combinations(users, 2):
            if monthly[u] == monthly[v]:
                key = (u, v)
                counts[key] = counts.get(key, 0) + 1
    return counts


def densities_oracle(g, is_novax) -> tuple[float, float, float]:
    """Brute-force pair scan over the adjacency matrix."""
    a = adjacency_matrix(g) > 0
    v_n = sum(is_novax)
    v_p = g.n - v_n
    wn = wp = cross = 0
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if not a[u, v]:
                continue
            if is_novax[u] and is_novax[v]:
                wn += 1
            elif not is_novax[u] and not is_novax[v]:
                wp += 1
            else:
                cross += 1
    e_n = wn / (v_n * (v_n - 1) / 2) if v_n >= 2 else 0.0
    e_p = wp / (v_p * (v_p - 1) / 2) if v_p >= 2 else 0.0
    e_o = cross / (v_n * v_p)
    return e_n, e_p, e_o


def ccf_oracle(a_vals, b_vals, lag) -> float:
    """Direct double-loop overlap-normalized correlation of z-scored series
    (None entries excluded)."""

    def znorm(vals):
        xs = [v for v in vals if v is not None]
        mu = sum(xs) / len(xs)
        sd = math.sqrt(sum((x - mu) ** 2 for x in xs) / len(xs))
        return [None if v is None else (v - mu) / sd for v in vals]

    az, bz = znorm(a_vals), znorm(b_vals)
    total, pairs = 0.0, 0
    for t in range(max(len(az), len(bz))):
        u = t + lag
        if 0 <= t < len(az) and 0 <= u < len(bz):
            if az[t] is not None and bz[u] is not None:
                total += az[t] * bz[u]
                pairs += 1
    return total / pairs
