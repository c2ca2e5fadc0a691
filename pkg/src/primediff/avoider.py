"""Extremal sets avoiding forbidden differences s with d s + 1 prime.

Sets live in [1, n]; bitmasks are arbitrary-precision ints with bit x for
element x, so conflict probes are single shift-and-AND operations.  The
exact solver is branch-and-bound over a most-constrained-first static
vertex order with the popcount bound; the greedy strategies share the same
blocked-mask insertion logic.  Primality is deterministic Miller-Rabin or,
when tables covering d(n-1)+1 are supplied, the sieve route; the two agree
(tested), keeping the search independent of the sieve stack.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .arith import ArithTables, is_prime
from .errors import DomainError, PreconditionError, ResourceError

__all__ = [
    "ForbiddenSet",
    "SearchResult",
    "greedy_avoiding",
    "growth_table",
    "is_avoiding",
    "max_avoiding_exact",
]


@dataclass(frozen=True)
class ForbiddenSet:
    """Differences s in [1, n-1] with d s + 1 prime, as bool array + bitmask."""

    n: int
    d: int
    bits: np.ndarray
    mask: int

    @classmethod
    def build(cls, n: int, d: int, tables: ArithTables | None = None) -> "ForbiddenSet":
        if n < 1 or d < 1:
            raise DomainError(f"need n, d >= 1, got n={n}, d={d}")
        bits = np.zeros(n, dtype=bool)
        if tables is not None and d * (n - 1) + 1 <= tables.n_max:
            s = np.arange(1, n, dtype=np.int64)
            vals = d * s + 1
            bits[1:] = tables.spf[vals] == vals
        else:
            for s in range(1, n):
                if is_prime(d * s + 1):
                    bits[s] = True
        mask = 0
        for s in np.nonzero(bits)[0].tolist():
            mask |= 1 << int(s)
        return cls(n=n, d=d, bits=bits, mask=mask)

    def forbidden(self, s: int) -> bool:
        return 0 < s < self.n and bool(self.bits[s])

    def count(self) -> int:
        return int(self.bits.sum())


def _set_mask(elements) -> int:
    mask = 0
    for x in elements:
        mask |= 1 << int(x)
    return mask


def is_avoiding(elements, fs: ForbiddenSet) -> bool:
    """True iff no pair of elements differs by a forbidden s."""
    return find_forbidden_pair(elements, fs) is None


def find_forbidden_pair(elements, fs: ForbiddenSet):
    """Smallest forbidden difference realized in the set, as
    (s, smaller, larger), or None.  Scans s ascending, then position."""
    mask = _set_mask(elements)
    for s in np.nonzero(fs.bits)[0].tolist():
        hit = mask & (mask >> int(s))
        if hit:
            b = (hit & -hit).bit_length() - 1
            return int(s), int(b), int(b + s)
    return None


@dataclass(frozen=True)
class SearchResult:
    elements: tuple
    size: int
    optimal: bool
    nodes: int
    seconds: float
    strategy: str


# ---------------------------------------------------------------------------
# exact search


def max_avoiding_exact(
    fs: ForbiddenSet,
    node_budget: int | None = None,
    exact_cap: int = 64,
) -> SearchResult:
    """Maximum avoiding subset of [1, n] by branch-and-bound.

    Vertices are processed in a static most-constrained-first order
    (fewest compatible successors, index as tie-break); at each node the
    lowest-order open vertex is branched on and subtrees die when
    size + popcount(candidates) cannot beat the incumbent.  With no budget
    the answer is optimal; with an exhausted budget the incumbent is
    returned with optimal=False."""
    n = fs.n
    if node_budget is None and n > exact_cap:
        raise ResourceError(
            f"exact search beyond n={exact_cap} needs an explicit node budget, got n={n}"
        )
    verts = list(range(1, n + 1))
    succ_count = {
        v: sum(1 for u in range(v + 1, n + 1) if not fs.bits[u - v]) for v in verts
    }
    order = sorted(verts, key=lambda v: (succ_count[v], v))
    pos = {v: i for i, v in enumerate(order)}

    compat = [0] * n
    for i, v in enumerate(order):
        m = 0
        for u in verts:
            if u != v and not fs.bits[abs(u - v)]:
                m |= 1 << pos[u]
        compat[i] = m

    # greedy incumbent for early pruning
    seed = greedy_avoiding(fs, strategy="first_fit")
    best_size = seed.size
    best_mask = 0
    for v in seed.elements:
        best_mask |= 1 << pos[v]

    t0 = time.perf_counter()
    nodes = 0
    truncated = False
    full = (1 << n) - 1
    stack = [(full, 0, 0)]  # candidates, chosen_mask, chosen_size
    while stack:
        cand, chosen, size = stack.pop()
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            truncated = True
            break
        if size > best_size:
            best_size, best_mask = size, chosen
        if not cand or size + bin(cand).count("1") <= best_size:
            continue
        low = cand & -cand
        i = low.bit_length() - 1
        # exclude branch first so the include branch is explored first (LIFO)
        stack.append((cand & ~low, chosen, size))
        stack.append((cand & compat[i], chosen | low, size + 1))

    elements = tuple(sorted(order[i] for i in range(n) if best_mask >> i & 1))
    if elements and not is_avoiding(elements, fs):
        raise PreconditionError("search produced a non-avoiding set; invariant broken")
    return SearchResult(
        elements=elements,
        size=best_size,
        optimal=not truncated,
        nodes=nodes,
        seconds=time.perf_counter() - t0,
        strategy="exact",
    )


# ---------------------------------------------------------------------------
# greedy strategies


def _insert_allowed(x: int, a_mask: int, a_rev: int, n: int, fs: ForbiddenSet) -> bool:
    # conflicts above: y = x + s in A;  below: via the reflected mask
    if (a_mask >> x) & fs.mask:
        return False
    xr = n + 1 - x
    if (a_rev >> xr) & fs.mask:
        return False
    return True


def _greedy_order(order, n: int, fs: ForbiddenSet):
    a_mask = 0
    a_rev = 0
    chosen = []
    for x in order:
        if _insert_allowed(x, a_mask, a_rev, n, fs):
            chosen.append(x)
            a_mask |= 1 << x
            a_rev |= 1 << (n + 1 - x)
    return chosen


def greedy_avoiding(
    fs: ForbiddenSet,
    strategy: str = "first_fit",
    seed: int = 0,
    passes: int = 4,
) -> SearchResult:
    """Heuristic avoiding set.

    first_fit: ascending scan, keep what fits.  random_local: best of a few
    random insertion orders, then remove-1/add-2 first-improvement local
    search, capped at `passes` sweeps.  Never claims optimality."""
    n = fs.n
    t0 = time.perf_counter()
    if strategy == "first_fit":
        chosen = _greedy_order(range(1, n + 1), n, fs)
        return SearchResult(
            tuple(chosen), len(chosen), False, 0, time.perf_counter() - t0, strategy
        )
    if strategy != "random_local":
        raise DomainError(f"unknown strategy {strategy!r}")

    rng = np.random.default_rng(seed)
    best = _greedy_order(range(1, n + 1), n, fs)
    for _ in range(3):
        order = rng.permutation(np.arange(1, n + 1)).tolist()
        cand = sorted(_greedy_order(order, n, fs))
        if len(cand) > len(best):
            best = cand

    current = set(best)
    for _ in range(passes):
        improved = False
        removal_order = sorted(current)
        rng.shuffle(removal_order)
        for r in removal_order:
            rest = current - {r}
            a_mask = _set_mask(rest)
            a_rev = _set_mask(n + 1 - x for x in rest)
            adds = []
            for x in range(1, n + 1):
                if x in rest:
                    continue
                if _insert_allowed(x, a_mask, a_rev, n, fs):
                    adds.append(x)
                    a_mask |= 1 << x
                    a_rev |= 1 << (n + 1 - x)
                    if len(adds) == 2:
                        break
            if len(adds) == 2:
                current = rest | set(adds)
                improved = True
                break
        if not improved:
            break

    elements = tuple(sorted(current))
    if elements and not is_avoiding(elements, fs):
        raise PreconditionError("greedy produced a non-avoiding set; invariant broken")
    return SearchResult(
        elements, len(elements), False, 0, time.perf_counter() - t0, strategy
    )


# ---------------------------------------------------------------------------
# growth profile


def growth_table(
    n_values,
    d: int,
    exact_cap: int = 24,
    seed: int = 0,
    tables: ArithTables | None = None,
) -> list[dict]:
    """Size-vs-n profile: exact solver up to exact_cap, first-fit greedy
    beyond, each row carrying the reference shape
    (log 2 / 2) log n / log log n for eyeballing growth."""
    rows = []
    for n in n_values:
        n = int(n)
        fs = ForbiddenSet.build(n, d, tables)
        if n <= exact_cap:
            res = max_avoiding_exact(fs)
        else:
            res = greedy_avoiding(fs, strategy="first_fit", seed=seed)
        shape = (math.log(2) / 2) * math.log(n) / math.log(math.log(n)) if n >= 3 else 0.0
        rows.append(
            {
                "n": n,
                "d": d,
                "size": res.size,
                "optimal": res.optimal,
                "strategy": res.strategy,
                "shape": shape,
            }
        )
    return rows
