"""Independent brute-force oracles.

Everything here is deliberately written from first principles (literal
recursions, direct set arithmetic, exhaustive enumeration, hand-rolled
linear algebra) and shares no code with the package it checks.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

# -- ewma / path metrics ------------------------------------------------------


def ewma_oracle(values, beta):
    """values: list of (entity, raw). Returns {entity: ewma} by literal
    sort-normalize-recurse steps."""
    ordered = sorted(values, key=lambda pair: (pair[1], pair[0]))
    raws = [raw for _, raw in ordered]
    lo = min(raws)
    hi = max(raws)
    norms = []
    for raw in raws:
        if hi > lo:
            norms.append((raw - lo) / (hi - lo))
        else:
            norms.append(0.5)
    out = {}
    previous = None
    for (entity, _), norm in zip(ordered, norms):
        if previous is None:
            current = norm
        else:
            current = (1 - beta) * previous + beta * norm
        out[entity] = current
        previous = current
    return out


def sep_oracle(popularities, shown_attr_sets, beta):
    """popularities: {attr: count} over the candidate universe;
    shown_attr_sets: list of attribute sets, one per explanation."""
    ewma = ewma_oracle(sorted(popularities.items()), beta)
    per_expl = []
    for shown in shown_attr_sets:
        if not shown:
            continue
        per_expl.append(sum(ewma[a] for a in shown) / len(shown))
    return sum(per_expl) / len(per_expl)


def lir_oracle(recencies, linked_item_lists, beta):
    ewma = ewma_oracle(sorted(recencies.items()), beta)
    per_expl = []
    for linked in linked_item_lists:
        if not linked:
            continue
        per_expl.append(sum(ewma[i] for i in linked) / len(linked))
    return sum(per_expl) / len(per_expl)


def etd_oracle(shown_attr_sets, k, universe):
    unique = set()
    for shown in shown_attr_sets:
        unique |= set(shown)
    value = len(unique) / min(k, len(universe))
    return min(1.0, value)


def mid_oracle(linked_item_lists_per_user):
    counts = []
    for lists in linked_item_lists_per_user:
        distinct = set()
        for linked in lists:
            distinct |= set(linked)
        counts.append(len(distinct))
    return sum(counts) / len(counts)


def tid_tpd_oracle(linked_item_lists, shown_attr_sets):
    items = set()
    attrs = set()
    for linked in linked_item_lists:
        items |= set(linked)
    for shown in shown_attr_sets:
        attrs |= set(shown)
    return len(items), len(attrs)


# -- scorers -------------------------------------------------------------------


def _direct_items(triples, items, attr):
    return {h for h, _, t in triples if t == attr and h in items}


def _children(triples, hierarchy_edges, attr):
    return {h for h, r, t in triples if t == attr and r in hierarchy_edges}


def _link_count(triples, items, attr, subset):
    return sum(1 for h, _, t in triples if t == attr and h in items and h in subset)


def idf_oracle(triples, items, attr):
    df = len(_direct_items(triples, items, attr))
    return math.log(len(items) / df)


def explod_oracle(triples, items, profile, recs, attr, alpha, beta_w):
    n_u = _link_count(triples, items, attr, profile)
    n_r = _link_count(triples, items, attr, recs)
    return (alpha * n_u / len(profile) + beta_w * n_r / len(recs)) * idf_oracle(triples, items, attr)


def explod_v2_oracle(triples, items, hierarchy_edges, profile, recs, attr, alpha, beta_w):
    children = _children(triples, hierarchy_edges, attr)
    if not children:
        return explod_oracle(triples, items, profile, recs, attr, alpha, beta_w)
    total = 0.0
    for child in children:
        if not _direct_items(triples, items, child):
            continue
        total += explod_oracle(triples, items, profile, recs, child, alpha, beta_w)
    return total * idf_oracle(triples, items, attr)


def pem_oracle(triples, items, hierarchy_edges, profile, recs, catalog, attr):
    reachable = set(_direct_items(triples, items, attr))
    for child in _children(triples, hierarchy_edges, attr):
        reachable |= _direct_items(triples, items, child)
    covered_catalog = len(reachable & set(catalog))
    direct_catalog = len(_direct_items(triples, items, attr) & set(catalog))
    if direct_catalog <= 1:
        return 0.0
    covered_profile = len(reachable & set(profile))
    return ((covered_profile / len(profile)) / (covered_catalog / len(catalog))) * math.log(direct_catalog)


def path_exists_oracle(triples, hierarchy_edges, item, attr, rec, transitive):
    """Brute-force check that item -> attr and rec -> attr paths exist,
    directly or through one hierarchy hop into a child of attr."""

    def connected(node):
        if any(h == node and t == attr for h, _, t in triples):
            return True
        if not transitive:
            return False
        for child in _children(triples, hierarchy_edges, attr):
            if any(h == node and t == child for h, _, t in triples):
                return True
        return False

    return connected(item) and connected(rec)


# -- linear algebra -------------------------------------------------------------


def gauss_jordan_inverse(matrix):
    """Plain Gauss-Jordan elimination with partial pivoting."""
    n = len(matrix)
    augmented = [[float(matrix[i][j]) for j in range(n)] + [1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(augmented[r][col]))
        if abs(augmented[pivot][col]) < 1e-300:
            raise ZeroDivisionError("singular matrix")
        augmented[col], augmented[pivot] = augmented[pivot], augmented[col]
        factor = augmented[col][col]
        augmented[col] = [v / factor for v in augmented[col]]
        for row in range(n):
            if row == col:
                continue
            scale = augmented[row][col]
            if scale != 0.0:
                augmented[row] = [rv - scale * cv for rv, cv in zip(augmented[row], augmented[col])]
    return [row[n:] for row in augmented]


def ease_matrix_oracle(x, lam):
    """Closed-form item-item weights via the hand-rolled inversion."""
    x = np.asarray(x, dtype=float)
    n_items = x.shape[1]
    gram = x.T @ x
    for i in range(n_items):
        gram[i, i] += lam
    p = np.array(gauss_jordan_inverse(gram.tolist()))
    b = np.zeros((n_items, n_items))
    for i in range(n_items):
        for j in range(n_items):
            if i != j:
                b[i, j] = -p[i, j] / p[j, j]
    return b


def ridge_ranking_oracle(x, lam, user_row):
    """Ranking from the unconstrained ridge system (XtX+lam I)^-1 XtX with a
    zeroed diagonal, solved by Gauss-Jordan."""
    x = np.asarray(x, dtype=float)
    n_items = x.shape[1]
    gram = x.T @ x
    reg = gram.copy()
    for i in range(n_items):
        reg[i, i] += lam
    b = np.array(gauss_jordan_inverse(reg.tolist())) @ gram
    for i in range(n_items):
        b[i, i] = 0.0
    scores = np.asarray(x[user_row] @ b).ravel()
    eligible = [j for j in range(n_items) if x[user_row, j] == 0]
    return sorted(eligible, key=lambda j: (-scores[j], j)), scores


def pagerank_power_oracle(adjacency, restart, damping, iterations=100):
    """Dense power method; adjacency is symmetric 0/1 (or weighted),
    restart a probability vector."""
    adjacency = np.asarray(adjacency, dtype=float)
    restart = np.asarray(restart, dtype=float)
    n = adjacency.shape[0]
    out_degree = adjacency.sum(axis=1)
    pr = restart.copy()
    for _ in range(iterations):
        incoming = np.zeros(n)
        for j in range(n):
            if out_degree[j] == 0:
                incoming += pr[j] * restart
            else:
                incoming += pr[j] * adjacency[j] / out_degree[j]
        pr = damping * incoming + (1 - damping) * restart
    return pr


# -- ranking metrics -------------------------------------------------------------


def ndcg_oracle(ranked, relevant, k):
    dcg = 0.0
    for position, item in enumerate(ranked[:k], start=1):
        if item in relevant:
            dcg += 1.0 / math.log2(position + 1)
    ideal = 0.0
    for position in range(1, min(k, len(relevant)) + 1):
        ideal += 1.0 / math.log2(position + 1)
    return dcg / ideal


def map_oracle(ranked, relevant, k):
    hits = 0
    total = 0.0
    for position, item in enumerate(ranked[:k], start=1):
        if item in relevant:
            hits += 1
            total += hits / position
    return total / min(k, len(relevant))


def gini_oracle(counts):
    """Mean absolute difference formulation."""
    counts = list(counts)
    n = len(counts)
    total = sum(counts)
    if total == 0:
        return 0.0
    diff_sum = sum(abs(a - b) for a in counts for b in counts)
    return diff_sum / (2 * n * total)


def entropy_oracle(counts):
    total = sum(counts)
    h = 0.0
    for c in counts:
        if c > 0:
            h -= (c / total) * math.log(c / total)
    return h


# -- wilcoxon -------------------------------------------------------------------


def wilcoxon_enumeration_oracle(diffs):
    """Two-sided exact p by enumerating all 2^n sign patterns over the
    midranks of |diffs| (zero differences dropped first)."""
    diffs = [d for d in diffs if d != 0]
    n = len(diffs)
    if n == 0:
        return 0.0, 1.0
    magnitudes = [abs(d) for d in diffs]
    order = sorted(range(n), key=lambda i: magnitudes[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and magnitudes[order[j + 1]] == magnitudes[order[i]]:
            j += 1
        for pos in range(i, j + 1):
            ranks[order[pos]] = (i + j) / 2 + 1
        i = j + 1
    w_plus = sum(r for d, r in zip(diffs, ranks) if d > 0)
    w_minus = sum(r for d, r in zip(diffs, ranks) if d < 0)
    lo, hi = min(w_plus, w_minus), max(w_plus, w_minus)
    count = 0
    for signs in itertools.product((1, -1), repeat=n):
        w = sum(r for s, r in zip(signs, ranks) if s > 0)
        if w <= lo + 1e-12 or w >= hi - 1e-12:
            count += 1
    return min(w_plus, w_minus), count / 2**n
