"""Independent brute-force oracles the library is tested against.

Everything here favors obviousness over speed and deliberately shares no
code paths with the implementations under test.
"""

from __future__ import annotations

from collections import deque
from itertools import product

from randgroups.words import Word, Presentation, free_reduce, invert


def reduce_one_pass(w: Word) -> Word:
    """Cancel at most one adjacent pair per pass."""
    for i in range(len(w) - 1):
        if w[i] == -w[i + 1]:
            return Word(w[:i] + w[i + 2 :])
    return Word(w)


def free_reduce_oracle(w: Word) -> Word:
    prev, cur = None, Word(w)
    while prev != cur:
        prev, cur = cur, reduce_one_pass(cur)
    return cur


def cyclic_reduce_oracle(w: Word):
    """Try all prefix peelings; returns the cyclically reduced core."""
    cur = free_reduce_oracle(w)
    conj = []
    while len(cur) >= 2 and cur[0] == -cur[-1]:
        conj.append(cur[0])
        cur = Word(cur[1:-1])
    return cur, Word(conj)


def all_cyclic_occurrences(p: Presentation, k: int):
    """Map each length-k word to its cyclic occurrences (relator, dir, start)."""
    occs = {}
    for j, r in enumerate(p.relators):
        for e in (1, -1):
            base = tuple(r) if e == 1 else tuple(invert(r))
            l = len(base)
            for s in range(l):
                window = tuple(base[(s + t) % l] for t in range(k))
                occs.setdefault(window, []).append((j, e, s))
    return occs


def max_piece_oracle(p: Presentation) -> int:
    """Quadratic/brute enumeration of every shared cyclic subword."""
    best = 0
    for k in range(1, p.length + 1):
        if any(len(v) >= 2 for v in all_cyclic_occurrences(p, k).values()):
            best = k
    return best


def enumerate_reduced_words(n: int, max_len: int):
    """All freely reduced words of length <= max_len over rank n."""
    alphabet = [i for i in range(1, n + 1)] + [-i for i in range(1, n + 1)]
    out = [Word()]
    frontier = [Word()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for a in alphabet:
                if w and w[-1] == -a:
                    continue
                nxt.append(Word(w + (a,)))
        out.extend(nxt)
        frontier = nxt
    return out


def insertion_neighbors(w: Word, elements, cap: int):
    """Reduced words reachable in one insert-a-relator move, length <= cap."""
    seen = set()
    for i in range(len(w) + 1):
        left, right = Word(w[:i]), Word(w[i:])
        for el in elements:
            nw = free_reduce(left.concat(el).concat(right))
            if len(nw) <= cap:
                seen.add(nw)
    return seen


def bfs_trivial_oracle(w: Word, p: Presentation, cap: int, max_states: int = 200_000):
    """BFS over insert-relator/free-reduce moves with a length cap.

    Returns True/False, or None if the state budget is exhausted before
    the search space within the cap is exhausted.
    """
    from randgroups.cancellation import symmetrize

    elements = symmetrize(p).elements
    start = free_reduce(w)
    if len(start) == 0:
        return True
    seen = {start}
    queue = deque([start])
    while queue:
        if len(seen) > max_states:
            return None
        cur = queue.popleft()
        for nw in insertion_neighbors(cur, elements, cap):
            if len(nw) == 0:
                return True
            if nw not in seen:
                seen.add(nw)
                queue.append(nw)
    return False


def set_partition_count(f: int, n: int) -> int:
    """Number of partitions of {1..f} into n nonempty blocks, by explicit
    enumeration (restricted growth strings)."""
    if n == 0:
        return 1 if f == 0 else 0
    count = 0

    # restricted growth: element i goes in an existing block or opens one
    def grow(i, used):
        nonlocal count
        if i == f:
            if used == n:
                count += 1
            return
        for b in range(used + 1):
            grow(i + 1, used + (1 if b == used else 0))

    grow(0, 0)
    return count


def transitive_closure_unify(n_positions: int, relations):
    """Brute-force signed closure of position identifications.

    relations: iterable of (i, j, sign) meaning position i equals position
    j (sign +1) or its reverse (sign -1).  Returns (labels, signs) where
    labels[i] is a component id and signs[i] the orientation relative to
    the component representative, or raises ValueError on a forced
    a = a^-1 conflict.
    """
    n = n_positions
    adj = {i: [] for i in range(n)}
    for i, j, s in relations:
        adj[i].append((j, s))
        adj[j].append((i, s))
    labels = [-1] * n
    signs = [0] * n
    comp = 0
    for root in range(n):
        if labels[root] != -1:
            continue
        labels[root] = comp
        signs[root] = 1
        stack = [root]
        while stack:
            v = stack.pop()
            for u, s in adj[v]:
                want = signs[v] * s
                if labels[u] == -1:
                    labels[u] = comp
                    signs[u] = want
                    stack.append(u)
                elif signs[u] != want:
                    raise ValueError("orientation conflict: a = a^-1 forced")
        comp += 1
    return labels, signs


def brute_all_paths(adj, dist, u: int, v: int):
    """All geodesic vertex paths u -> v by exhaustive DFS over edges,
    using only the distance-from-u array for pruning-free verification."""
    target_len = dist[v]
    paths = []

    def walk(path):
        cur = path[-1]
        if cur == v:
            if len(path) - 1 == target_len:
                paths.append(list(path))
            return
        if len(path) - 1 >= target_len:
            return
        for w in adj[cur]:
            if w >= 0 and w not in path:
                path.append(w)
                walk(path)
                path.pop()
    walk([u])
    return paths
