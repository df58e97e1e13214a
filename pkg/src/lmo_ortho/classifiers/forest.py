"""Random forest of weighted-Gini decision trees over sparse features.

Tree growth and traversal are numba kernels working directly on CSC/CSR
arrays; zeros are never materialised, the implicit zero block of a column is
handled as one group during the split scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .base import FeatureSpace, Model, TrainingError, as_matrix, balanced_class_weights, encode_labels


@numba.njit(cache=True)
def _next_random(state):
    # splitmix64; state is a length-1 uint64 array
    state[0] = state[0] + np.uint64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True)
def _row_value(indptr, indices, data, row, col):
    lo = indptr[row]
    hi = indptr[row + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        c = indices[mid]
        if c == col:
            return data[mid]
        if c < col:
            lo = mid + 1
        else:
            hi = mid
    return 0.0


@numba.njit(cache=True)
def _gather(f, start, end, node, samples, node_mark, csc_indptr, csc_indices, csc_data,
            csr_indptr, csr_indices, csr_data, out_rows, out_vals):
    """Collect (row, value) of the non-zero entries of column f inside the node."""
    n_node = end - start
    col_nnz = csc_indptr[f + 1] - csc_indptr[f]
    cnt = 0
    if n_node * 8 < col_nnz:
        for i in range(start, end):
            r = samples[i]
            v = _row_value(csr_indptr, csr_indices, csr_data, r, f)
            if v != 0.0:
                out_rows[cnt] = r
                out_vals[cnt] = v
                cnt += 1
    else:
        for p in range(csc_indptr[f], csc_indptr[f + 1]):
            r = csc_indices[p]
            if node_mark[r] == node:
                out_rows[cnt] = r
                out_vals[cnt] = csc_data[p]
                cnt += 1
    return cnt


@numba.njit(cache=True)
def _grow_tree(csc_indptr, csc_indices, csc_data, csr_indptr, csr_indices, csr_data,
               y, sw, samples, n_classes, n_features, n_wanted, seed):
    n_rows = y.shape[0]
    n_s = samples.shape[0]
    max_nodes = 2 * n_s + 1
    feature = np.full(max_nodes, -1, np.int64)
    threshold = np.zeros(max_nodes)
    left = np.full(max_nodes, -1, np.int64)
    right = np.full(max_nodes, -1, np.int64)
    value = np.zeros((max_nodes, n_classes))

    rng = np.empty(1, np.uint64)
    rng[0] = np.uint64(seed)
    pool = np.arange(n_features)
    node_mark = np.full(n_rows, -1, np.int64)
    buf_rows = np.empty(n_rows, np.int64)
    buf_vals = np.empty(n_rows)
    xval = np.zeros(n_rows)
    tot = np.zeros(n_classes)
    zero_w = np.zeros(n_classes)
    lw = np.zeros(n_classes)

    st_node = np.empty(max_nodes, np.int64)
    st_start = np.empty(max_nodes, np.int64)
    st_end = np.empty(max_nodes, np.int64)
    top = 0
    st_node[0] = 0
    st_start[0] = 0
    st_end[0] = n_s
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = st_node[top]
        start = st_start[top]
        end = st_end[top]
        n_node = end - start

        tot[:] = 0.0
        for i in range(start, end):
            r = samples[i]
            tot[y[r]] += sw[r]
        value[node, :] = tot
        n_present = 0
        total_w = 0.0
        parent_score = 0.0
        for k in range(n_classes):
            total_w += tot[k]
            if tot[k] > 0.0:
                n_present += 1
        if n_present <= 1 or n_node < 2:
            continue
        for k in range(n_classes):
            parent_score += tot[k] * tot[k]
        parent_score /= total_w
        best_score = parent_score * (1.0 + 1e-12)
        best_f = -1
        best_thr = 0.0

        for i in range(start, end):
            node_mark[samples[i]] = node

        visited = 0
        drawn = 0
        while drawn < n_features and visited < n_wanted:
            j = drawn + np.int64(_next_random(rng) % np.uint64(n_features - drawn))
            tmp = pool[drawn]
            pool[drawn] = pool[j]
            pool[j] = tmp
            f = pool[drawn]
            drawn += 1

            cnt = _gather(f, start, end, node, samples, node_mark, csc_indptr, csc_indices,
                          csc_data, csr_indptr, csr_indices, csr_data, buf_rows, buf_vals)
            n_zero = n_node - cnt
            if cnt == 0:
                continue
            order = np.argsort(buf_vals[:cnt], kind="mergesort")
            if n_zero == 0 and buf_vals[order[0]] == buf_vals[order[cnt - 1]]:
                continue
            visited += 1

            zero_w[:] = tot
            for q in range(cnt):
                r = buf_rows[q]
                zero_w[y[r]] -= sw[r]
            lw[:] = 0.0
            n_left = 0
            p = 0
            zero_done = n_zero == 0
            have_prev = False
            prev = 0.0
            while True:
                if not zero_done and (p >= cnt or buf_vals[order[p]] > 0.0):
                    nxt = 0.0
                    is_zero = True
                elif p < cnt:
                    nxt = buf_vals[order[p]]
                    is_zero = False
                else:
                    break
                if have_prev and n_left > 0:
                    wl = 0.0
                    for k in range(n_classes):
                        wl += lw[k]
                    wr = total_w - wl
                    if wl > 0.0 and wr > 0.0:
                        sl = 0.0
                        sr = 0.0
                        for k in range(n_classes):
                            sl += lw[k] * lw[k]
                            rk = tot[k] - lw[k]
                            sr += rk * rk
                        score = sl / wl + sr / wr
                        if score > best_score:
                            best_score = score
                            best_f = f
                            thr = prev + (nxt - prev) / 2.0
                            if thr >= nxt:
                                thr = prev
                            best_thr = thr
                if is_zero:
                    for k in range(n_classes):
                        lw[k] += zero_w[k]
                    n_left += n_zero
                    zero_done = True
                else:
                    while p < cnt and buf_vals[order[p]] == nxt:
                        r = buf_rows[order[p]]
                        lw[y[r]] += sw[r]
                        n_left += 1
                        p += 1
                prev = nxt
                have_prev = True

        if best_f < 0:
            continue

        cnt = _gather(best_f, start, end, node, samples, node_mark, csc_indptr, csc_indices,
                      csc_data, csr_indptr, csr_indices, csr_data, buf_rows, buf_vals)
        for q in range(cnt):
            xval[buf_rows[q]] = buf_vals[q]
        lo = start
        hi = end - 1
        while lo <= hi:
            if xval[samples[lo]] <= best_thr:
                lo += 1
            else:
                tmp = samples[lo]
                samples[lo] = samples[hi]
                samples[hi] = tmp
                hi -= 1
        for q in range(cnt):
            xval[buf_rows[q]] = 0.0

        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        # right pushed first so the left subtree is grown first
        st_node[top] = n_nodes + 1
        st_start[top] = lo
        st_end[top] = end
        top += 1
        st_node[top] = n_nodes
        st_start[top] = start
        st_end[top] = lo
        top += 1
        n_nodes += 2

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), value[:n_nodes].copy())


@numba.njit(cache=True)
def _apply_tree(indptr, indices, data, feature, threshold, left, right):
    n = indptr.shape[0] - 1
    out = np.empty(n, np.int64)
    for i in range(n):
        node = 0
        while left[node] != -1:
            v = _row_value(indptr, indices, data, i, feature[node])
            node = left[node] if v <= threshold[node] else right[node]
        out[i] = node
    return out


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # (n_nodes, K) weighted class totals

    def __post_init__(self):
        n = self.feature.shape[0]
        internal = self.left >= 0
        if np.any((self.left >= n) | (self.right >= n)) or np.any(internal != (self.right >= 0)):
            raise ValueError("tree has dangling child references")
        leaves = self.value[~internal]
        if np.any(leaves < 0) or np.any(leaves.sum(axis=1) <= 0):
            raise ValueError("tree leaf distributions must be non-negative and non-zero")

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def apply(self, X) -> np.ndarray:
        return _apply_tree(X.indptr.astype(np.int64), X.indices.astype(np.int64), X.data,
                           self.feature, self.threshold, self.left, self.right)

    def leaf_distribution(self, X) -> np.ndarray:
        v = self.value[self.apply(X)]
        return v / v.sum(axis=1, keepdims=True)


@dataclass
class ForestModel(Model):
    classes: list[str]
    trees: list[Tree]
    n_features_: int
    seed: int = 0
    feature_space: FeatureSpace = None
    kind: str = "rf"
    info: dict = field(default_factory=dict, compare=False)

    @property
    def n_features(self) -> int:
        return self.n_features_

    def decision_scores(self, X) -> np.ndarray:
        """Mean of per-tree leaf class distributions."""
        X = as_matrix(X, self.n_features)
        acc = np.zeros((X.shape[0], len(self.classes)))
        for tree in self.trees:
            acc += tree.leaf_distribution(X)
        return acc / len(self.trees)

    def _confidences(self, scores):
        return scores


def train_rf(
    X,
    y,
    n_trees: int = 100,
    seed: int = 0,
    feature_space: FeatureSpace = None,
) -> ForestModel:
    """Bootstrap-aggregated trees with balanced class weights.

    Tree t draws its bootstrap sample and its node-level feature sampling
    stream from ``default_rng([seed, t])``, so trees are independent of the
    order (or parallelism) in which they are built. At each node features are
    drawn without replacement until ceil(sqrt(D)) of them are non-constant in
    the node (or the features run out).
    """
    X = as_matrix(X)
    if X.shape[0] != len(y):
        raise TrainingError(f"{X.shape[0]} feature rows but {len(y)} labels")
    if X.shape[0] == 0:
        raise TrainingError("no training samples")
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    classes, yi = encode_labels(y)
    n, dim = X.shape
    cw = balanced_class_weights(yi.tolist())
    class_w = np.array([cw[i] for i in range(len(classes))])

    csr = X
    csc = X.tocsc()
    csc.sort_indices()
    arrays = (
        csc.indptr.astype(np.int64), csc.indices.astype(np.int64), csc.data,
        csr.indptr.astype(np.int64), csr.indices.astype(np.int64), csr.data,
    )
    n_wanted = math.ceil(math.sqrt(dim))
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        counts = np.bincount(rng.integers(0, n, n), minlength=n)
        tree_seed = int(rng.integers(0, 2**63 - 1))
        sw = counts * class_w[yi]
        samples = np.flatnonzero(counts).astype(np.int64)
        parts = _grow_tree(*arrays, yi, sw, samples, len(classes), dim, n_wanted, tree_seed)
        trees.append(Tree(*parts))
    return ForestModel(classes, trees, dim, seed, feature_space)
