"""Exact maximum independent sets by branch and bound.

Candidates are always taken in increasing vertex order, and the bound at
each node is a greedy clique cover of the remaining candidates: an
independent set meets each clique at most once.  Covering from the highest
index down gives, for every candidate ``v``, the number of cliques needed
for the candidates at or above ``v``, so pruning happens per vertex rather
than per node.

Two drivers share that search:

* general graphs use a Russian-doll outer loop, which records the exact
  independence number of every suffix ``{i, ..., n-1}`` and uses it as a
  second bound;
* graphs carrying a :class:`VertexTransitiveSymmetry` fix vertex 0 in the
  solution and prune every partial set that is not the lexicographically
  least among its images under the known automorphisms.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

from .graphs import ExplicitGraph

DEFAULT_MAX_NODES = 10**8
DEFAULT_TIME_LIMIT = 600.0
STRATEGIES = ("auto", "max-degree")


class MalformedGraphError(ValueError):
    pass


@dataclass
class MisResult:
    size: int
    witness: list[int]
    optimal: bool
    nodes_explored: int
    time_budget_hit: bool = False
    node_budget_hit: bool = False
    seconds: float = 0.0
    method: str = ""

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "optimal": self.optimal,
            "witness": list(self.witness),
            "nodes": self.nodes_explored,
            "time_budget_hit": self.time_budget_hit,
            "node_budget_hit": self.node_budget_hit,
            "seconds": round(self.seconds, 3),
            "method": self.method,
        }


class _Budget(Exception):
    pass


class _Improved(Exception):
    pass


def alpha_base(p: int, q: int) -> int:
    """Independence number of the single fraction graph E_{p/q}."""
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive")
    return p // q


def clique_cover(adj, P: int) -> list[list[int]]:
    """Greedy cover of the vertex set ``P`` by cliques, highest index first."""
    classes = []
    U = P
    while U:
        cls = []
        Q = U
        while Q:
            v = Q.bit_length() - 1
            bit = 1 << v
            cls.append(v)
            U ^= bit
            Q ^= bit
            Q &= adj[v]
        classes.append(cls)
    return classes


def greedy_min_degree(G: ExplicitGraph) -> list[int]:
    """Repeatedly take a vertex of least residual degree (ties: least index)."""
    P = (1 << G.n) - 1
    chosen = []
    while P:
        best_v, best_d = -1, -1
        R = P
        while R:
            low = R & -R
            v = low.bit_length() - 1
            d = bin(G.adj[v] & P).count("1")
            if best_d < 0 or d < best_d:
                best_v, best_d = v, d
            R ^= low
        chosen.append(best_v)
        P &= ~G.adj[best_v] & ~(1 << best_v)
    return sorted(chosen)


class _Search:
    def __init__(self, G: ExplicitGraph, max_nodes: int, time_limit: float, check_bounds: bool):
        self.G = G
        self.adj = G.adj
        full = (1 << G.n) - 1
        self.later_nonadj = [full & ~G.adj[v] & ~((1 << (v + 1)) - 1) for v in range(G.n)]
        self.max_nodes = max_nodes
        self.deadline = time.monotonic() + time_limit
        self.check_bounds = check_bounds
        self.nodes = 0
        self.best: list[int] = []
        self.suffix_alpha: list[int] | None = None
        self.lex_test = None
        self.stop_on_improve = False

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise _Budget("nodes")
        if not self.nodes & 1023 and time.monotonic() > self.deadline:
            raise _Budget("time")

    def expand(self, chosen: list[int], P: int) -> None:
        self._tick()
        adj = self.adj
        # cover from the top: colour[v] = cliques needed for candidates >= v
        colour = {}
        U = P
        k = 0
        while U:
            k += 1
            Q = U
            cls = []
            while Q:
                v = Q.bit_length() - 1
                bit = 1 << v
                colour[v] = k
                U ^= bit
                Q ^= bit
                Q &= adj[v]
                if self.check_bounds:
                    cls.append(v)
            if self.check_bounds:
                assert all((adj[u] >> w) & 1 for i, u in enumerate(cls) for w in cls[i + 1 :]), "cover class is not a clique"
        size = len(chosen)
        verts = sorted(colour)
        need = [0] * (len(verts) + 1)
        for i in range(len(verts) - 1, -1, -1):
            c = colour[verts[i]]
            need[i] = c if c > need[i + 1] else need[i + 1]
        suffix = self.suffix_alpha
        for i, v in enumerate(verts):
            best = len(self.best)
            if size + need[i] <= best:
                return
            if suffix is not None and size + suffix[v] <= best:
                return
            chosen.append(v)
            if self.lex_test is None or self.lex_test(chosen):
                if size + 1 > len(self.best):
                    self.best = list(chosen)
                    if self.stop_on_improve:
                        raise _Improved
                NP = P & self.later_nonadj[v]
                if NP:
                    self.expand(chosen, NP)
            chosen.pop()


# below this order the JIT start-up costs more than it saves
COMPILED_MIN_ORDER = 128


def _lex_leader_test(sym, n):
    if n >= COMPILED_MIN_ORDER:
        import numpy as np

        from ._kernels import is_lex_leader

        transversal = np.asarray(sym.transversal, dtype=np.int32)
        stabilizer = np.asarray(sym.stabilizer, dtype=np.int32).reshape(len(sym.stabilizer), n)
        return lambda T: is_lex_leader(np.asarray(T, dtype=np.int32), transversal, stabilizer)

    transversal = sym.transversal
    stabilizer = sym.stabilizer

    def test(T: list[int]) -> bool:
        # T is sorted and contains 0; only images s(t_u(T)) with u in T can be smaller
        for u in T:
            tu = transversal[u]
            base = [tu[w] for w in T]
            if u and sorted(base) < T:
                return False
            for s in stabilizer:
                if sorted(s[w] for w in base) < T:
                    return False
        return True

    return test


def solve(
    G: ExplicitGraph,
    max_nodes: int = DEFAULT_MAX_NODES,
    time_limit: float = DEFAULT_TIME_LIMIT,
    use_symmetry: bool = True,
    check_bounds: bool = False,
    strategy: str = "auto",
) -> MisResult:
    """Maximum independent set of ``G``.

    Returns the best set found; ``optimal`` is true only when the search
    finished inside the node and time budgets.  ``strategy`` is ``"auto"``
    (lex-leader search when ``G`` carries symmetry, Russian doll otherwise),
    or ``"max-degree"`` for plain include/exclude branching on a vertex of
    largest residual degree.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if not isinstance(G, ExplicitGraph):
        raise MalformedGraphError("expected an ExplicitGraph")
    t0 = time.monotonic()
    if G.n == 0:
        return MisResult(0, [], True, 0, method="empty")
    search = _Search(G, max_nodes, time_limit, check_bounds)
    greedy = greedy_min_degree(G)
    search.best = list(greedy)
    symmetric = use_symmetry and G.symmetry is not None and strategy == "auto"
    method = "max-degree" if strategy == "max-degree" else "lex-leader" if symmetric else "russian-doll"
    hit = None
    try:
        if strategy == "max-degree":
            _max_degree(search, [], (1 << G.n) - 1)
        elif symmetric:
            search.lex_test = _lex_leader_test(G.symmetry, G.n)
            # some maximum independent set contains vertex 0
            search.expand([0], search.later_nonadj[0])
        else:
            _russian_doll(search)
    except _Budget as exc:
        hit = str(exc)
    # a truncated Russian-doll run can end below the greedy start
    witness = sorted(search.best if len(search.best) >= len(greedy) else greedy)
    if not G.is_independent(witness):
        raise AssertionError("solver produced a dependent set")
    return MisResult(
        size=len(witness),
        witness=witness,
        optimal=hit is None,
        nodes_explored=search.nodes,
        time_budget_hit=hit == "time",
        node_budget_hit=hit == "nodes",
        seconds=time.monotonic() - t0,
        method=method,
    )


def _russian_doll(search: _Search) -> None:
    # suffix[i] = alpha of the subgraph on {i, ..., n-1}; it grows by at most one per step
    n = search.G.n
    suffix = [0] * (n + 1)
    search.suffix_alpha = suffix
    search.stop_on_improve = True
    incumbent = search.best
    search.best = []
    for i in range(n - 1, -1, -1):
        if not search.best:
            search.best = [i]
        try:
            search.expand([i], search.later_nonadj[i])
        except _Improved:
            pass
        suffix[i] = len(search.best)
    if len(incumbent) > len(search.best):
        raise AssertionError("heuristic beat an exact search")


def _max_degree(search: _Search, chosen: list[int], P: int) -> None:
    search._tick()
    adj = search.adj
    if len(chosen) + len(clique_cover(adj, P)) <= len(search.best):
        return
    if search.check_bounds:
        for cls in clique_cover(adj, P):
            assert all((adj[u] >> w) & 1 for i, u in enumerate(cls) for w in cls[i + 1 :]), "cover class is not a clique"
    best_v, best_d = -1, -1
    R = P
    while R:
        low = R & -R
        v = low.bit_length() - 1
        d = bin(adj[v] & P).count("1")
        if d > best_d:
            best_v, best_d = v, d
        R ^= low
    if best_d == 0:
        # what is left is independent
        rest = chosen + [v for v in range(P.bit_length()) if P >> v & 1]
        if len(rest) > len(search.best):
            search.best = sorted(rest)
        return
    bit = 1 << best_v
    chosen.append(best_v)
    _max_degree(search, chosen, P & ~adj[best_v] & ~bit)
    chosen.pop()
    _max_degree(search, chosen, P & ~bit)
