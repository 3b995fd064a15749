"""Hot numeric kernels for signed-graph partitioning.

Every kernel here runs in one of two modes, chosen once at import time:
compiled with numba's ``@njit`` (the default when numba is importable), or
as plain Python over numpy arrays when the environment variable
``VOTEPATTERNS_NO_NUMBA`` is set to a truthy value (or numba is missing).
Both modes execute the *same* source, so results are bit-identical; see
``benchmarks/bench_kernels.py`` for the speed difference.

Floating-point contract: partition costs are always accumulated in the
same order (per-node inner sums over earlier neighbors, chained node by
node), so the enumerator, the branch-and-bound search and the public
cost function agree to the last bit for any given assignment.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dep, but stay importable
    numba = None

_FLAG = os.environ.get("VOTEPATTERNS_NO_NUMBA", "").strip().lower()
NUMBA_ENABLED = numba is not None and _FLAG not in ("1", "true", "yes", "on")

# Slack added on top of the incumbent when pruning with the lookahead
# bound: the bound is maintained incrementally, so it may drift from the
# exactly-accumulated cost by a few ulps. The prefix-cost prune needs no
# slack (same accumulation order as leaf costs).
BOUND_SLACK = 1e-9


def _maybe_jit(func):
    if NUMBA_ENABLED:
        return numba.njit(cache=True, nogil=True)(func)
    return func


@_maybe_jit
def node_cost(w, labels, i, b):
    # frustration added by putting node i into block b, against nodes j < i
    ci = 0.0
    for j in range(i):
        wij = w[i, j]
        if wij > 0.0:
            if labels[j] != b:
                ci += wij
        elif wij < 0.0:
            if labels[j] == b:
                ci -= wij
    return ci


@_maybe_jit
def assignment_cost(w, labels):
    # canonical accumulation order: inner sum per node, then chain the nodes
    n = w.shape[0]
    total = 0.0
    for i in range(1, n):
        total += node_cost(w, labels, i, labels[i])
    return total


@_maybe_jit
def brute_force_rgs(w):
    """Enumerate every set partition as a restricted-growth string.

    Lexicographic order; strict-improvement updates, so the returned
    labels are the lexicographically smallest optimum. Returns
    (best_labels, best_cost, partitions_enumerated).
    """
    n = w.shape[0]
    labels = np.zeros(n, np.int64)
    maxl = np.zeros(n, np.int64)
    pcost = np.zeros(n, np.float64)
    for i in range(1, n):
        pcost[i] = pcost[i - 1] + node_cost(w, labels, i, 0)
    best = labels.copy()
    best_cost = pcost[n - 1] if n > 0 else 0.0
    count = 1
    while True:
        i = n - 1
        while i >= 1 and labels[i] > maxl[i - 1]:
            i -= 1
        if i < 1:
            break
        labels[i] += 1
        if labels[i] > maxl[i - 1]:
            maxl[i] = labels[i]
        else:
            maxl[i] = maxl[i - 1]
        pcost[i] = pcost[i - 1] + node_cost(w, labels, i, labels[i])
        for t in range(i + 1, n):
            labels[t] = 0
            maxl[t] = maxl[t - 1]
            pcost[t] = pcost[t - 1] + node_cost(w, labels, t, 0)
        count += 1
        if pcost[n - 1] < best_cost:
            best_cost = pcost[n - 1]
            best[:] = labels
    return best, best_cost, count


@_maybe_jit
def _lex_less(a, b):
    for i in range(a.shape[0]):
        if a[i] != b[i]:
            return a[i] < b[i]
    return False


@_maybe_jit
def bnb_chunk(w, labels, maxl, pcost, trial, posq, negq, ptot,
              snap_pos, snap_neg, snap_ptot, best_labels, istate, fstate,
              chunk_nodes):
    """Resumable depth-first branch and bound over restricted-growth strings.

    All search state lives in the passed arrays so the caller can stop on
    a wall-clock or node budget and resume later. istate = [position,
    nodes_explored, done]; fstate = [best_cost].

    Prunes on the exact prefix cost (safe for ties) and on an admissible
    lookahead: each unassigned node pays at least its cheapest placement
    against the nodes assigned so far. posq/negq/ptot hold those
    per-block positive/negative contributions; snapshots restore them
    exactly on backtrack.
    """
    n = w.shape[0]
    i = istate[0]
    explored = istate[1]
    best_cost = fstate[0]
    budget = explored + chunk_nodes
    while i >= 1:
        if explored >= budget:
            istate[0] = i
            istate[1] = explored
            fstate[0] = best_cost
            return
        b = trial[i]
        if b > maxl[i - 1] + 1:
            # labels exhausted: undo node i-1's contribution and step back
            i -= 1
            if i >= 1:
                lb = labels[i]
                for t in range(i + 1, n):
                    posq[t, lb] = snap_pos[i, t]
                    negq[t, lb] = snap_neg[i, t]
                    ptot[t] = snap_ptot[i, t]
                trial[i] = labels[i] + 1
            continue
        explored += 1
        ci = node_cost(w, labels, i, b)
        pc = pcost[i - 1] + ci
        if pc > best_cost:
            trial[i] = b + 1
            continue
        labels[i] = b
        maxl[i] = maxl[i - 1] if maxl[i - 1] > b else b
        pcost[i] = pc
        if i == n - 1:
            if pc < best_cost or (pc == best_cost and _lex_less(labels, best_labels)):
                best_cost = pc
                best_labels[:] = labels
            trial[i] = b + 1
            continue
        # apply node i's contribution to the not-yet-assigned nodes
        for t in range(i + 1, n):
            snap_pos[i, t] = posq[t, b]
            snap_neg[i, t] = negq[t, b]
            snap_ptot[i, t] = ptot[t]
            wti = w[t, i]
            if wti > 0.0:
                posq[t, b] += wti
                ptot[t] += wti
            elif wti < 0.0:
                negq[t, b] -= wti
        # lookahead bound
        nb = maxl[i] + 1
        fb = 0.0
        for t in range(i + 1, n):
            m = ptot[t]  # opening a fresh block cuts every positive tie
            for c in range(nb):
                v = negq[t, c] + (ptot[t] - posq[t, c])
                if v < m:
                    m = v
            fb += m
        if pc + fb > best_cost + BOUND_SLACK:
            for t in range(i + 1, n):
                posq[t, b] = snap_pos[i, t]
                negq[t, b] = snap_neg[i, t]
                ptot[t] = snap_ptot[i, t]
            trial[i] = b + 1
            continue
        i += 1
        trial[i] = 0
    istate[0] = i
    istate[1] = explored
    istate[2] = 1
    fstate[0] = best_cost


@_maybe_jit
def greedy_local(w):
    """Greedy insertion in node order, then single-node-move local search.

    Moves are accepted only when they improve the cost by more than 1e-12
    (guards against ulp cycling). Returns restricted-growth labels and the
    number of candidate evaluations performed.
    """
    n = w.shape[0]
    labels = np.zeros(n, np.int64)
    evals = 0
    nb = 1
    for i in range(1, n):
        bb = 0
        bc = node_cost(w, labels, i, 0)
        evals += 1
        for b in range(1, nb + 1):
            c = node_cost(w, labels, i, b)
            evals += 1
            if c < bc:
                bc = c
                bb = b
        labels[i] = bb
        if bb == nb:
            nb += 1
    # local search: best single-node move per scan, until no move helps
    posb = np.zeros(n + 1, np.float64)
    negb = np.zeros(n + 1, np.float64)
    improved = True
    while improved:
        improved = False
        maxlab = 0
        for i in range(n):
            if labels[i] > maxlab:
                maxlab = labels[i]
        fresh = maxlab + 1
        for i in range(n):
            for b in range(fresh + 1):
                posb[b] = 0.0
                negb[b] = 0.0
            base_pos = 0.0
            for j in range(n):
                if j == i:
                    continue
                wij = w[i, j]
                if wij > 0.0:
                    base_pos += wij
                    posb[labels[j]] += wij
                elif wij < 0.0:
                    negb[labels[j]] -= wij
            cur = labels[i]
            cur_cost = negb[cur] + (base_pos - posb[cur])
            best_b = cur
            best_delta = 0.0
            for b in range(fresh + 1):
                if b == cur:
                    continue
                evals += 1
                delta = (negb[b] + (base_pos - posb[b])) - cur_cost
                if delta < best_delta:
                    best_delta = delta
                    best_b = b
            if best_delta < -1e-12:
                labels[i] = best_b
                if best_b == fresh:
                    fresh += 1
                improved = True
    # relabel to restricted-growth form
    out = np.empty(n, np.int64)
    mapping = np.full(n + 1, -1, np.int64)
    nxt = 0
    for i in range(n):
        l = labels[i]
        if mapping[l] < 0:
            mapping[l] = nxt
            nxt += 1
        out[i] = mapping[l]
    return out, evals
