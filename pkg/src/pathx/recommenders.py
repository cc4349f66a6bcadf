"""Five implicit-feedback recommenders behind a single fit/recommend
interface.

All models consume a binarized training :class:`~pathx.data.Dataset` and
produce per-user ranked lists that never contain the user's training items.
Ranking is deterministic everywhere: score descending, then item id
ascending.  Unknown users receive the most-popular fallback list, flagged
on the returned ranking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .data import Dataset
from .kg import EntityId, KnowledgeGraph

KINDS = ("most_pop", "user_knn", "pagerank", "bpr_mf", "ease")

_KNOWN_PARAMS = {
    "most_pop": set(),
    "user_knn": {"k_neighbors"},
    "pagerank": {"damping", "profile_restart_mass", "tol", "max_iter"},
    "bpr_mf": {"factors", "learning_rate", "epochs", "negatives", "init_std", "reg"},
    "ease": {"lam", "dtype"},
}


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown recommender kind {self.kind!r}; expected one of {KINDS}")
        unknown = set(self.params) - _KNOWN_PARAMS[self.kind]
        if unknown:
            raise ValueError(f"unknown params for {self.kind}: {sorted(unknown)}")


@dataclass(frozen=True)
class RankedList:
    user: str
    items: tuple[tuple[EntityId, float], ...]
    k: int
    fallback: bool = False


class FittedModel:
    """Shared ranking plumbing; subclasses provide per-user score vectors."""

    kind: str = ""

    def __init__(self, train: Dataset):
        if len(train) == 0:
            raise ValueError("cannot fit on an empty training set")
        self.users: tuple[str, ...] = train.users
        self.items: tuple[EntityId, ...] = train.items
        self._user_index = {u: idx for idx, u in enumerate(self.users)}
        self._item_index = {i: idx for idx, i in enumerate(self.items)}
        self._train_item_idx: list[np.ndarray] = [np.empty(0, dtype=np.int64)] * len(self.users)
        per_user: dict[int, set[int]] = {}
        for inter in train.interactions:
            per_user.setdefault(self._user_index[inter.user], set()).add(self._item_index[inter.item])
        for u_idx, item_set in per_user.items():
            self._train_item_idx[u_idx] = np.fromiter(sorted(item_set), dtype=np.int64)
        self._popularity = np.zeros(len(self.items))
        for inter in train.interactions:
            self._popularity[self._item_index[inter.item]] += 1.0

    def _interaction_matrix(self, train: Dataset) -> sp.csr_matrix:
        rows = [self._user_index[i.user] for i in train.interactions]
        cols = [self._item_index[i.item] for i in train.interactions]
        data = np.ones(len(rows))
        mat = sp.csr_matrix((data, (rows, cols)), shape=(len(self.users), len(self.items)))
        mat.data[:] = 1.0  # collapse duplicate interactions
        mat.sum_duplicates()
        mat.data[:] = 1.0
        return mat

    # -- scoring -------------------------------------------------------------

    def _score_users(self, user_indices: np.ndarray) -> np.ndarray:
        """Score matrix (len(user_indices) x n_items), higher is better."""
        raise NotImplementedError

    def _rank(self, scores: np.ndarray, exclude: np.ndarray, k: int) -> list[tuple[EntityId, float]]:
        masked = scores.astype(float, copy=True)
        masked[exclude] = -np.inf
        order = np.argsort(-masked, kind="stable")
        out = []
        for idx in order[: k + len(exclude)]:
            if masked[idx] == -np.inf:
                continue
            out.append((self.items[int(idx)], float(scores[int(idx)])))
            if len(out) == k:
                break
        return out

    def recommend(self, user: str, k: int) -> RankedList:
        return self.recommend_many([user], k)[0]

    def recommend_many(self, users: Sequence[str], k: int) -> list[RankedList]:
        if k < 1:
            raise ValueError("k must be positive")
        known = [(pos, self._user_index[u]) for pos, u in enumerate(users) if u in self._user_index]
        results: list[RankedList | None] = [None] * len(users)
        if known:
            idx_arr = np.asarray([u_idx for _, u_idx in known])
            scores = self._score_users(idx_arr)
            for row, (pos, u_idx) in enumerate(known):
                ranked = self._rank(scores[row], self._train_item_idx[u_idx], k)
                results[pos] = RankedList(users[pos], tuple(ranked), k)
        for pos, user in enumerate(users):
            if results[pos] is None:
                ranked = self._rank(self._popularity, np.empty(0, dtype=np.int64), k)
                results[pos] = RankedList(user, tuple(ranked), k, fallback=True)
        return results  # type: ignore[return-value]


class MostPopModel(FittedModel):
    """Non-personalized: items ranked by training interaction count."""

    kind = "most_pop"

    def __init__(self, train: Dataset):
        super().__init__(train)
        self.counts = self._popularity.copy()

    def _score_users(self, user_indices: np.ndarray) -> np.ndarray:
        return np.tile(self.counts, (len(user_indices), 1))


class UserKnnModel(FittedModel):
    """Neighborhood model: cosine similarity between user interaction rows.

    The neighborhood size defaults to ceil(sqrt(n_users)).  Scores are the
    similarity-weighted sum of the top-K neighbors' interactions.
    """

    kind = "user_knn"

    def __init__(self, train: Dataset, k_neighbors: int | None = None):
        super().__init__(train)
        self.x = self._interaction_matrix(train)
        self.k_neighbors = k_neighbors if k_neighbors is not None else math.ceil(math.sqrt(len(self.users)))
        norms = np.asarray(np.sqrt(self.x.multiply(self.x).sum(axis=1))).ravel()
        norms[norms == 0] = 1.0
        normalized = sp.diags(1.0 / norms) @ self.x
        self.sims = np.asarray((normalized @ normalized.T).todense())
        np.fill_diagonal(self.sims, -np.inf)  # self is never a neighbor

    def _score_users(self, user_indices: np.ndarray) -> np.ndarray:
        k = min(self.k_neighbors, len(self.users) - 1)
        out = np.zeros((len(user_indices), len(self.items)))
        for row, u_idx in enumerate(user_indices):
            order = np.argsort(-self.sims[u_idx], kind="stable")[:k]
            weights = np.where(np.isfinite(self.sims[u_idx][order]), self.sims[u_idx][order], 0.0)
            out[row] = (sp.csr_matrix(weights) @ self.x[order]).toarray().ravel()
        return out


class PageRankModel(FittedModel):
    """Personalized PageRank over the knowledge graph.

    The walk runs on the undirected triple graph.  The restart vector puts
    ``profile_restart_mass`` (default 0.8) uniformly on the user's
    interacted items and the remaining mass uniformly on every node.
    """

    kind = "pagerank"

    def __init__(
        self,
        train: Dataset,
        g: KnowledgeGraph,
        damping: float = 0.85,
        profile_restart_mass: float = 0.8,
        tol: float = 1e-12,
        max_iter: int = 200,
    ):
        super().__init__(train)
        self.damping = damping
        self.profile_restart_mass = profile_restart_mass
        self.tol = tol
        self.max_iter = max_iter
        self.nodes: tuple[EntityId, ...] = tuple(sorted(g.entities))
        self._node_index = {n: idx for idx, n in enumerate(self.nodes)}
        n = len(self.nodes)
        heads = np.array([self._node_index[t.head] for t in g.triples], dtype=np.int64)
        tails = np.array([self._node_index[t.tail] for t in g.triples], dtype=np.int64)
        rows = np.concatenate([heads, tails])
        cols = np.concatenate([tails, heads])
        adj = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        degrees = np.asarray(adj.sum(axis=1)).ravel()
        self._dangling = degrees == 0
        degrees[self._dangling] = 1.0
        # column-stochastic walk matrix: W[:, j] moves mass out of node j
        self._walk = (sp.diags(1.0 / degrees) @ adj).T.tocsr()
        self._item_node_idx = np.array(
            [self._node_index.get(item, -1) for item in self.items], dtype=np.int64
        )

    def _restart_vectors(self, user_indices: np.ndarray) -> np.ndarray:
        n = len(self.nodes)
        v = np.full((n, len(user_indices)), (1.0 - self.profile_restart_mass) / n)
        for col, u_idx in enumerate(user_indices):
            profile_nodes = [
                self._node_index[self.items[i]]
                for i in self._train_item_idx[u_idx]
                if self.items[i] in self._node_index
            ]
            if profile_nodes:
                v[profile_nodes, col] += self.profile_restart_mass / len(profile_nodes)
            else:
                v[:, col] += self.profile_restart_mass / n
        return v

    def node_scores(self, user: str) -> dict[EntityId, float]:
        """Full per-node stationary distribution for one user (sums to 1)."""
        u_idx = self._user_index[user]
        pr = self._power_iterate(self._restart_vectors(np.array([u_idx])))
        return {node: float(pr[idx, 0]) for idx, node in enumerate(self.nodes)}

    def _power_iterate(self, v: np.ndarray) -> np.ndarray:
        pr = v.copy()
        for _ in range(self.max_iter):
            spread = self._walk @ pr
            if self._dangling.any():
                lost = pr[self._dangling].sum(axis=0)
                spread = spread + v * lost
            nxt = self.damping * spread + (1.0 - self.damping) * v
            delta = np.abs(nxt - pr).sum(axis=0).max()
            pr = nxt
            if delta < self.tol:
                break
        return pr

    def _score_users(self, user_indices: np.ndarray) -> np.ndarray:
        out = np.zeros((len(user_indices), len(self.items)))
        chunk = 128
        for start in range(0, len(user_indices), chunk):
            block = user_indices[start : start + chunk]
            pr = self._power_iterate(self._restart_vectors(block))
            for col in range(len(block)):
                valid = self._item_node_idx >= 0
                scores = np.zeros(len(self.items))
                scores[valid] = pr[self._item_node_idx[valid], col]
                out[start + col] = scores
        return out


class EaseModel(FittedModel):
    """Closed-form linear item-item model (Steck, WWW 2019).

    B = I - P / diag(P) with P = (X^T X + lam*I)^-1 and an exactly zero
    diagonal; user scores are x_u @ B.
    """

    kind = "ease"

    def __init__(self, train: Dataset, lam: float = 500.0, dtype=np.float64):
        super().__init__(train)
        self.lam = lam
        self.x = self._interaction_matrix(train)
        gram = np.asarray((self.x.T @ self.x).todense(), dtype=np.float64)
        diag = np.diag_indices(gram.shape[0])
        gram[diag] += lam
        p = np.linalg.inv(gram)
        b = -p / np.diag(p)
        b[diag] = 0.0
        self.b = b.astype(dtype)

    def _score_users(self, user_indices: np.ndarray) -> np.ndarray:
        rows = self.x[user_indices].toarray().astype(self.b.dtype)
        return rows @ self.b


class BprMfModel(FittedModel):
    """Matrix factorization trained with the BPR pairwise objective
    (Rendle et al., 2009) by seeded SGD.

    One uniformly sampled negative per positive, sigmoid gradient updates,
    optional L2 regularization.  ``epoch_losses`` records the mean softplus
    of the negative score margin per epoch.
    """

    kind = "bpr_mf"

    def __init__(
        self,
        train: Dataset,
        seed: int,
        factors: int = 32,
        learning_rate: float = 0.05,
        epochs: int = 30,
        negatives: int = 1,
        init_std: float = 0.1,
        reg: float = 0.0,
    ):
        super().__init__(train)
        rng = np.random.default_rng(seed)
        n_users, n_items = len(self.users), len(self.items)
        self.p = rng.normal(0.0, init_std, size=(n_users, factors))
        self.q = rng.normal(0.0, init_std, size=(n_items, factors))
        positives = np.array(
            sorted({(self._user_index[i.user], self._item_index[i.item]) for i in train.interactions}),
            dtype=np.int64,
        )
        train_sets = [set(arr.tolist()) for arr in self._train_item_idx]
        self.epoch_losses: list[float] = []
        lr = learning_rate
        for _ in range(epochs):
            order = rng.permutation(len(positives))
            loss = 0.0
            for row in order:
                u, i = positives[row]
                for _ in range(negatives):
                    j = int(rng.integers(n_items))
                    while j in train_sets[u]:
                        j = int(rng.integers(n_items))
                    pu, qi, qj = self.p[u], self.q[i], self.q[j]
                    x_uij = float(pu @ (qi - qj))
                    loss += math.log1p(math.exp(-x_uij)) if x_uij > -30 else -x_uij
                    g = 1.0 / (1.0 + math.exp(min(x_uij, 30.0)))
                    self.p[u] = pu + lr * (g * (qi - qj) - reg * pu)
                    self.q[i] = qi + lr * (g * pu - reg * qi)
                    self.q[j] = qj + lr * (-g * pu - reg * qj)
            self.epoch_losses.append(loss / (len(positives) * negatives))

    def _score_users(self, user_indices: np.ndarray) -> np.ndarray:
        return self.p[user_indices] @ self.q.T


def fit(spec: ModelSpec, train: Dataset, g: KnowledgeGraph | None = None, seed: int = 0) -> FittedModel:
    """Fit the recommender described by ``spec`` on ``train``.

    The knowledge graph is required for the pagerank kind and ignored by
    the others.  Fitting is deterministic given ``seed``.
    """
    params = dict(spec.params)
    if spec.kind == "most_pop":
        return MostPopModel(train)
    if spec.kind == "user_knn":
        return UserKnnModel(train, **params)
    if spec.kind == "pagerank":
        if g is None:
            raise ValueError("pagerank requires a knowledge graph")
        return PageRankModel(train, g, **params)
    if spec.kind == "ease":
        return EaseModel(train, **params)
    if spec.kind == "bpr_mf":
        return BprMfModel(train, seed=seed, **params)
    raise ValueError(f"unknown recommender kind {spec.kind!r}")
