"""Fraction graphs E_{p/q}, their strong powers, and quotients by subgroups.

Vertices of E_{p/q}^n are tuples in (Z/pZ)^n.  When a power is materialized,
vertex ``v`` gets the index whose base-p digits are ``v`` (first coordinate
most significant), so index order is lexicographic order.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import CapacityError, to_scalar
from .groups import SubgroupSet, Vector, add_mod, closure, reduce_vector

DEFAULT_MATERIALIZE_CAP = 10**5
DEFAULT_ALPHA_GRP_CAP = 10**4
# symmetry tables are |V|^2 integers; skip them beyond this order
SYMMETRY_MAX_ORDER = 4096


def circdist(x: int, y: int, p: int) -> int:
    d = (x - y) % p
    return min(d, p - d)


@dataclass(frozen=True)
class FractionGraphPower:
    """E_{p/q}^n described symbolically by (p, q, n)."""

    p: int
    q: int
    n: int = 1

    def __post_init__(self):
        if self.p < 1 or self.q < 1 or self.n < 1:
            raise ValueError("p, q and n must be positive")

    @property
    def order(self) -> int:
        return self.p**self.n

    def adjacent(self, u: Sequence[int], v: Sequence[int]) -> bool:
        if len(u) != self.n or len(v) != self.n:
            raise ValueError(f"vertices must have {self.n} coordinates")
        same = True
        for x, y in zip(u, v):
            d = circdist(x, y, self.p)
            if d >= self.q:
                return False
            if d:
                same = False
        return not same

    def is_near_zero(self, d: Sequence[int]) -> bool:
        """True when ``d`` is nonzero and adjacent to the origin."""
        return self.adjacent(d, (0,) * self.n)

    def connection_set(self) -> tuple[Vector, ...]:
        """Nonzero d with every coordinate at circular distance < q from 0."""
        span = sorted({x % self.p for x in range(-(self.q - 1), self.q)})
        zero = (0,) * self.n
        return tuple(d for d in itertools.product(span, repeat=self.n) if d != zero)

    def index(self, v: Sequence[int]) -> int:
        i = 0
        for x in v:
            i = i * self.p + (x % self.p)
        return i

    def vertex(self, i: int) -> Vector:
        out = []
        for _ in range(self.n):
            i, r = divmod(i, self.p)
            out.append(r)
        return tuple(reversed(out))

    def vertices(self) -> Iterable[Vector]:
        return itertools.product(range(self.p), repeat=self.n)

    def materialize(self, cap: int = DEFAULT_MATERIALIZE_CAP) -> "ExplicitGraph":
        N = self.order
        if N > cap:
            raise CapacityError(f"{N} vertices exceeds materialization cap {cap}")
        verts = list(self.vertices())
        conn = self.connection_set()
        adj = []
        for v in verts:
            mask = 0
            for d in conn:
                mask |= 1 << self.index(add_mod(v, d, self.p))
            adj.append(mask)
        sym = _power_symmetry(self, verts) if N <= SYMMETRY_MAX_ORDER else None
        return ExplicitGraph(N, tuple(adj), symmetry=sym)

    def label(self) -> str:
        base = f"E_{{{self.p}/{self.q}}}"
        return base if self.n == 1 else f"{base}^{self.n}"


def _signed_permutations(n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    return [(perm, signs) for perm in itertools.permutations(range(n)) for signs in itertools.product((1, -1), repeat=n)]


def _apply_signed(perm, signs, v: Sequence[int], p: int) -> Vector:
    return tuple((signs[i] * v[perm[i]]) % p for i in range(len(v)))


def _power_symmetry(G: FractionGraphPower, verts: list[Vector]) -> "VertexTransitiveSymmetry":
    idx = G.index
    p = G.p
    transversal = tuple(
        tuple(idx(tuple((x - y) % p for x, y in zip(w, u))) for w in verts) for u in verts
    )
    stabilizer = tuple(
        tuple(idx(_apply_signed(perm, signs, w, p)) for w in verts)
        for perm, signs in _signed_permutations(G.n)
        if any(perm[i] != i for i in range(G.n)) or any(s < 0 for s in signs)
    )
    return VertexTransitiveSymmetry(transversal, stabilizer)


@dataclass(frozen=True)
class VertexTransitiveSymmetry:
    """Automorphisms of a vertex-transitive graph, split as coset reps and a stabilizer.

    ``transversal[u]`` is an automorphism (as an index permutation) sending
    ``u`` to vertex 0; ``stabilizer`` lists automorphisms fixing vertex 0.
    Together they generate every automorphism image that contains vertex 0,
    which is all the solver's lex-leader test needs.
    """

    transversal: tuple[tuple[int, ...], ...]
    stabilizer: tuple[tuple[int, ...], ...] = ()

    def check(self, adj: Sequence[int]) -> bool:
        n = len(adj)
        maps = list(self.transversal) + list(self.stabilizer)
        for k, m in enumerate(self.transversal):
            if m[k] != 0:
                return False
        if any(m[0] != 0 for m in self.stabilizer):
            return False
        for m in maps:
            if sorted(m) != list(range(n)):
                return False
            for u in range(n):
                a = adj[u]
                img = 0
                while a:
                    low = a & -a
                    img |= 1 << m[low.bit_length() - 1]
                    a ^= low
                if img != adj[m[u]]:
                    return False
        return True


@dataclass(frozen=True)
class ExplicitGraph:
    """Simple graph on vertices 0..n-1 with adjacency rows stored as int bitsets."""

    n: int
    adj: tuple[int, ...]
    symmetry: VertexTransitiveSymmetry | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise ValueError("adjacency length does not match vertex count")
        for u, row in enumerate(self.adj):
            if row >> self.n:
                raise ValueError(f"vertex {u} has a neighbour out of range")
            if (row >> u) & 1:
                raise ValueError(f"self-loop at vertex {u}")
        for u, row in enumerate(self.adj):
            r = row
            while r:
                low = r & -r
                v = low.bit_length() - 1
                if not (self.adj[v] >> u) & 1:
                    raise ValueError(f"adjacency is not symmetric at ({u}, {v})")
                r ^= low

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "ExplicitGraph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def degree(self, u: int) -> int:
        return bin(self.adj[u]).count("1")

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for u in range(self.n):
            r = self.adj[u] >> (u + 1)
            v = u + 1
            while r:
                if r & 1:
                    out.append((u, v))
                r >>= 1
                v += 1
        return out

    def is_independent(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        mask = 0
        for v in vs:
            mask |= 1 << v
        if bin(mask).count("1") != len(vs):
            return False
        return all(not (self.adj[v] & mask) for v in vs)

    def to_dimacs(self) -> str:
        edges = self.edges()
        lines = [f"p edges {self.n} {len(edges)}"]
        lines += [f"e {u + 1} {v + 1}" for u, v in edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dimacs(cls, text: str) -> "ExplicitGraph":
        n = None
        edges = []
        for k, line in enumerate(text.splitlines(), 1):
            tok = line.split()
            if not tok or tok[0] == "c":
                continue
            if tok[0] == "p":
                if len(tok) != 4:
                    raise ValueError(f"line {k}: malformed problem line")
                n = int(tok[2])
            elif tok[0] == "e":
                if n is None:
                    raise ValueError(f"line {k}: edge before problem line")
                u, v = int(tok[1]) - 1, int(tok[2]) - 1
                if not (0 <= u < n and 0 <= v < n):
                    raise ValueError(f"line {k}: vertex out of range")
                edges.append((u, v))
            else:
                raise ValueError(f"line {k}: unknown record {tok[0]!r}")
        if n is None:
            raise ValueError("missing problem line")
        return cls.from_edges(n, edges)


def is_independent(G: FractionGraphPower, S) -> bool:
    """Independence of a vertex set in G.

    A :class:`SubgroupSet` is tested by differences: it is independent iff
    no nonzero element is adjacent to the origin.  Other collections fall
    back to checking every pair.
    """
    if isinstance(S, SubgroupSet):
        if S.p != G.p or S.n != G.n:
            raise ValueError("subgroup lives in a different group")
        return not any(G.is_near_zero(s) for s in S.nonzero())
    pts = [reduce_vector(v, G.p) for v in S]
    if len(set(pts)) != len(pts):
        return False
    return not any(G.adjacent(u, v) for u, v in itertools.combinations(pts, 2))


def map_up(S: SubgroupSet, a: int, b: int, p: int, q: int) -> tuple[SubgroupSet, FractionGraphPower]:
    """Carry an independent subgroup of E_{a/b}^n into E_{(lp)/(lq)}^n.

    Coordinates are multiplied by ``l p / a`` where ``l`` is the common
    modulus ``a``; this is a group homomorphism and a cohomomorphism
    whenever ``a/b <= p/q``, so the image is again an independent subgroup
    of the same size.
    """
    if S.p != a:
        raise ValueError("subgroup modulus does not match a")
    if not (Fraction(2) <= Fraction(a, b) <= Fraction(p, q)):
        raise ValueError(f"need 2 <= a/b <= p/q, got a/b = {a}/{b}, p/q = {p}/{q}")
    mult = p  # l p / a with l = a
    target = FractionGraphPower(a * p, a * q, S.n)
    elems = tuple(sorted(tuple((mult * x) % target.p for x in v) for v in S.elements))
    gens = tuple(tuple((mult * x) % target.p for x in g) for g in S.generators)
    image = SubgroupSet(target.p, S.n, elems, gens)
    if len(set(elems)) != len(S):
        raise ArithmeticError("map is not injective")
    if not is_independent(target, image):
        raise ArithmeticError("image is not independent")
    return image, target


def round_to_fraction(N: int, x) -> tuple[int, int]:
    """Fraction graph induced on the order-N subgroup of the circle graph with parameter x."""
    x = to_scalar(x)
    if N < 2:
        raise ValueError("N must be >= 2")
    if x < 2:
        raise ValueError("x must be >= 2")
    return N, math.ceil(Fraction(N) / x)


@dataclass(frozen=True)
class CosetQuotient:
    base: FractionGraphPower
    H: SubgroupSet
    representatives: tuple[Vector, ...]
    coset_of: dict = field(repr=False, compare=False)
    quotient: ExplicitGraph = field(repr=False, compare=False)

    @property
    def coset_count(self) -> int:
        return len(self.representatives)

    def coset(self, c: int) -> list[Vector]:
        r = self.representatives[c]
        return sorted(add_mod(r, h, self.base.p) for h in self.H)


def build_quotient(
    G: FractionGraphPower, generators: Sequence[Sequence[int]], cap: int = DEFAULT_MATERIALIZE_CAP
) -> CosetQuotient:
    """Quotient of G by the subgroup generated by ``generators``.

    Two cosets are adjacent when some pair of their elements is adjacent in
    G, i.e. when one coset meets the other shifted by the connection set.
    """
    H = closure(generators, G.p, G.n)
    if not is_independent(G, H):
        raise ValueError("subgroup is not independent in the base graph")
    count, rem = divmod(G.order, len(H))
    if rem:
        raise ArithmeticError("subgroup order does not divide the group order")
    if count > cap:
        raise CapacityError(f"{count} cosets exceeds materialization cap {cap}")
    p = G.p
    coset_of: dict[Vector, int] = {}
    reps: list[Vector] = []
    for v in G.vertices():
        if v in coset_of:
            continue
        c = len(reps)
        reps.append(v)  # first hit in lex order is the least element of its coset
        for h in H:
            coset_of[add_mod(v, h, p)] = c
    conn = G.connection_set()
    adj = [0] * count
    for c, r in enumerate(reps):
        mask = 0
        for d in conn:
            c2 = coset_of[add_mod(r, d, p)]
            mask |= 1 << c2
        # c2 == c would put a connection vector inside H, excluded above
        adj[c] = mask
    sym = _quotient_symmetry(G, H, reps, coset_of) if count <= SYMMETRY_MAX_ORDER else None
    quotient = ExplicitGraph(count, tuple(adj), symmetry=sym)
    return CosetQuotient(G, H, tuple(reps), coset_of, quotient)


def _quotient_symmetry(G, H, reps, coset_of) -> VertexTransitiveSymmetry:
    # translations descend to the quotient; signed coordinate permutations
    # descend when they map H onto itself
    p = G.p
    Hset = set(H.elements)
    transversal = tuple(
        tuple(coset_of[tuple((x - y) % p for x, y in zip(w, r))] for w in reps) for r in reps
    )
    stabilizer = []
    for perm, signs in _signed_permutations(G.n):
        if all(i == perm[i] for i in range(G.n)) and all(s > 0 for s in signs):
            continue
        if all(_apply_signed(perm, signs, h, p) in Hset for h in H):
            stabilizer.append(tuple(coset_of[_apply_signed(perm, signs, w, p)] for w in reps))
    return VertexTransitiveSymmetry(transversal, tuple(stabilizer))


def lift_set(Q: CosetQuotient, witness: Iterable[int]) -> list[Vector]:
    """Union of the chosen cosets, checked for independence directly in the base graph."""
    chosen = sorted(set(witness))
    if not Q.quotient.is_independent(chosen):
        raise ValueError("witness is not independent in the quotient")
    lifted = [v for c in chosen for v in Q.coset(c)]
    G = Q.base
    pts = set(lifted)
    conn = G.connection_set()
    for u in lifted:
        for d in conn:
            if add_mod(u, d, G.p) in pts:
                raise ArithmeticError("lifted set is not independent")
    # second, slower route: every pair through the adjacency oracle
    if len(lifted) <= 600 and any(G.adjacent(u, v) for u, v in itertools.combinations(lifted, 2)):
        raise ArithmeticError("lifted set is not independent")
    return lifted


def lift_bound(Q: CosetQuotient, witness: Iterable[int]) -> int:
    """|H| times the number of cosets in ``witness``, after lifting and re-checking."""
    lifted = lift_set(Q, witness)
    k = len(set(witness))
    if len(lifted) != len(Q.H) * k:
        raise ArithmeticError("lifted set has the wrong size")
    return len(lifted)


def max_independent_subgroup(
    p: int, q: int, n: int = 1, cap: int = DEFAULT_ALPHA_GRP_CAP, max_generators: int | None = None
) -> SubgroupSet:
    """Largest subgroup of (Z/pZ)^n that is independent in E_{p/q}^n.

    Every subgroup is generated by at most n elements and is independent
    only if all its cyclic subgroups are, so the search joins independent
    cyclic subgroups one at a time and never extends a dependent one.
    ``max_generators`` (default n) bounds the number of joins.
    """
    G = FractionGraphPower(p, q, n)
    if G.order > cap:
        raise CapacityError(f"p^n = {G.order} exceeds cap {cap}")
    if max_generators is None:
        max_generators = n
    seen: set[frozenset] = set()
    cyclic: list[SubgroupSet] = []
    for g in G.vertices():
        if not any(g):
            continue
        S = closure([g], p, n)
        key = frozenset(S.elements)
        if key in seen:
            continue
        seen.add(key)
        if is_independent(G, S):
            cyclic.append(S)
    best = closure([], p, n)
    frontier = cyclic
    for _ in range(max_generators):
        grown = []
        for S in frontier:
            if len(S) > len(best):
                best = S
            for C in cyclic:
                if C.generators[0] in S:
                    continue
                J = closure(S.generators + C.generators, p, n)
                key = frozenset(J.elements)
                if key in seen:
                    continue
                seen.add(key)
                if is_independent(G, J):
                    grown.append(J)
        frontier = grown
    for S in frontier:
        if len(S) > len(best):
            best = S
    return best


def alpha_grp_exhaustive(p: int, q: int, n: int = 1, cap: int = DEFAULT_ALPHA_GRP_CAP, max_generators: int | None = None) -> int:
    return len(max_independent_subgroup(p, q, n, cap, max_generators))
