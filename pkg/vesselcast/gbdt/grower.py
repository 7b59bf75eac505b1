"""
Level-wise histogram tree growth.

All nodes of one depth are handled together: a single ``np.bincount`` per
group of nodes fills the gradient and hessian histograms of every
(node, feature, bin), and a cumulative sum over the bins scores every
candidate threshold with the missing values sent left and then right.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from vesselcast.config import GbdtParams
from vesselcast.gbdt.binning import BinSchema
from vesselcast.gbdt.tree import Tree

logger = logging.getLogger(__name__)

# bounds for the per-level working arrays
HIST_CELLS = 1 << 20
ROW_CHUNK = 1 << 18


@dataclass
class SplitChoice:
    """Best split of each node in a group (gain <= 0 means no split)."""
    gain: np.ndarray
    feature: np.ndarray
    bin: np.ndarray
    default_left: np.ndarray
    G: np.ndarray
    H: np.ndarray


def split_gain(GL, HL, GR, HR, lambda_: float, gamma: float):
    """Regularized loss reduction of splitting (GL+GR, HL+HR) into two children."""
    G = GL + GR
    H = HL + HR
    return 0.5 * (GL * GL / (HL + lambda_) + GR * GR / (HR + lambda_) - G * G / (H + lambda_)) - gamma


def leaf_value(G, H, lambda_: float):
    return -G / (H + lambda_)


def flat_keys(codes: np.ndarray, schema: BinSchema) -> np.ndarray:
    """Histogram slot of every (row, feature): f * n_slots + bin."""
    F = codes.shape[1]
    return codes.astype(np.int64) + np.arange(F, dtype=np.int64) * schema.n_slots


def build_histograms(
    keys: np.ndarray,
    node_pos: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    rows: np.ndarray,
    n_nodes: int,
    n_cells: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gradient and hessian histograms of shape (n_nodes, F * n_slots).

    ``node_pos[rows]`` is each row's node position within the group. Rows
    are accumulated in fixed-size chunks in order, so the sums do not depend
    on how the caller schedules work.
    """
    F = keys.shape[1]
    hist_g = np.zeros(n_nodes * n_cells)
    hist_h = np.zeros(n_nodes * n_cells)
    for s in range(0, len(rows), ROW_CHUNK):
        r = rows[s:s + ROW_CHUNK]
        k = (node_pos[r][:, None] * n_cells + keys[r]).ravel()
        hist_g += np.bincount(k, weights=np.repeat(g[r], F), minlength=n_nodes * n_cells)
        hist_h += np.bincount(k, weights=np.repeat(h[r], F), minlength=n_nodes * n_cells)
    return hist_g.reshape(n_nodes, n_cells), hist_h.reshape(n_nodes, n_cells)


def find_best_splits(
    hist_g: np.ndarray,
    hist_h: np.ndarray,
    schema: BinSchema,
    params: GbdtParams,
) -> SplitChoice:
    """
    Best (feature, threshold, missing direction) of every node in a group.

    Candidates are ordered feature, threshold, then missing-left before
    missing-right; the first maximum wins ties.
    """
    A = hist_g.shape[0]
    F = schema.n_features
    S = schema.n_slots
    nb = schema.n_bins
    hg = hist_g.reshape(A, F, S)
    hh = hist_h.reshape(A, F, S)

    G = hg[:, 0, :].sum(axis=1)
    H = hh[:, 0, :].sum(axis=1)

    # left sums for threshold index k: bins 0..k
    cg = np.cumsum(hg[:, :, : nb - 1], axis=2)
    ch = np.cumsum(hh[:, :, : nb - 1], axis=2)
    miss_g = hg[:, :, nb:nb + 1]
    miss_h = hh[:, :, nb:nb + 1]
    K = nb - 1

    has_threshold = np.arange(K)[None, :] < schema.threshold_counts()[:, None]  # (F, K)
    lam, mcw = params.lambda_, params.min_child_weight
    Gc = G[:, None, None]
    Hc = H[:, None, None]

    gains = np.empty((A, F, K, 2))
    with np.errstate(divide="ignore", invalid="ignore"):
        for d, (GL, HL) in enumerate(((cg + miss_g, ch + miss_h), (cg, ch))):
            GR = Gc - GL
            HR = Hc - HL
            gain = split_gain(GL, HL, GR, HR, lam, params.gamma)
            valid = has_threshold[None] & (HL >= mcw) & (HR >= mcw) & (HL > 0) & (HR > 0)
            gains[..., d] = np.where(valid & np.isfinite(gain), gain, -np.inf)

    flat = gains.reshape(A, F * K * 2)
    best = np.argmax(flat, axis=1)
    return SplitChoice(
        gain=flat[np.arange(A), best],
        feature=best // (K * 2),
        bin=(best // 2) % K,
        default_left=(best % 2) == 0,
        G=G,
        H=H,
    )


def grow_tree(
    codes: np.ndarray,
    keys: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    schema: BinSchema,
    params: GbdtParams,
) -> Tuple[Tree, np.ndarray]:
    """
    Grow one tree to at most ``max_depth`` (root at depth 0).

    Returns:
        Tuple of (tree, leaf node id of every training row).
    """
    n, F = codes.shape
    n_cells = F * schema.n_slots
    group = max(1, HIST_CELLS // n_cells)

    feature = [-1]
    threshold = [np.nan]
    default_left = [False]
    left = [-1]
    right = [-1]
    value = [0.0]

    sample_node = np.zeros(n, dtype=np.int64)
    active = np.array([0], dtype=np.int64)

    for depth in range(params.max_depth + 1):
        if len(active) == 0:
            break
        A = len(active)
        pos_of_node = np.full(len(feature), -1, dtype=np.int64)
        pos_of_node[active] = np.arange(A)
        pos = pos_of_node[sample_node]

        member = np.flatnonzero(pos >= 0)

        if depth == params.max_depth:
            G = np.bincount(pos[member], weights=g[member], minlength=A)
            H = np.bincount(pos[member], weights=h[member], minlength=A)
            for a, node in enumerate(active.tolist()):
                value[node] = float(leaf_value(G[a], H[a], params.lambda_))
            break

        order = member[np.argsort(pos[member], kind="stable")]
        sorted_pos = pos[order]
        chosen = []
        for a0 in range(0, A, group):
            a1 = min(A, a0 + group)
            lo, hi = np.searchsorted(sorted_pos, [a0, a1])
            hist_g, hist_h = build_histograms(
                keys, pos - a0, g, h, order[lo:hi], a1 - a0, n_cells,
            )
            chosen.append(find_best_splits(hist_g, hist_h, schema, params))

        gain = np.concatenate([c.gain for c in chosen])
        f_best = np.concatenate([c.feature for c in chosen])
        b_best = np.concatenate([c.bin for c in chosen])
        dl_best = np.concatenate([c.default_left for c in chosen])
        G = np.concatenate([c.G for c in chosen])
        H = np.concatenate([c.H for c in chosen])

        splits = gain > 0
        next_active = []
        child_left = np.full(A, -1, dtype=np.int64)
        child_right = np.full(A, -1, dtype=np.int64)
        for a, node in enumerate(active.tolist()):
            if not splits[a]:
                value[node] = float(leaf_value(G[a], H[a], params.lambda_))
                continue
            f = int(f_best[a])
            k = int(b_best[a])
            feature[node] = f
            threshold[node] = float(schema.thresholds[f][k])
            default_left[node] = bool(dl_best[a])
            for side in (child_left, child_right):
                side[a] = len(feature)
                next_active.append(len(feature))
                feature.append(-1)
                threshold.append(np.nan)
                default_left.append(False)
                left.append(-1)
                right.append(-1)
                value.append(0.0)
            left[node] = int(child_left[a])
            right[node] = int(child_right[a])

        if splits.any():
            moving = member[splits[pos[member]]]
            p = pos[moving]
            code = codes[moving, f_best[p]].astype(np.int64)
            go_left = np.where(code == schema.missing_bin, dl_best[p], code <= b_best[p])
            sample_node[moving] = np.where(go_left, child_left[p], child_right[p])

        active = np.array(next_active, dtype=np.int64)

    tree = Tree(
        feature=np.array(feature, dtype=np.int32),
        threshold=np.array(threshold, dtype=np.float64),
        default_left=np.array(default_left, dtype=bool),
        left=np.array(left, dtype=np.int32),
        right=np.array(right, dtype=np.int32),
        value=np.array(value, dtype=np.float64),
    )
    return tree, sample_node
