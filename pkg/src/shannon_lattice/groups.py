"""Subgroups of (Z/pZ)^n, stored explicitly."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .exact import CapacityError

DEFAULT_ENUM_CAP = 10**7

Vector = tuple[int, ...]


def reduce_vector(v: Iterable[int], p: int) -> Vector:
    return tuple(int(x) % p for x in v)


def add_mod(u: Sequence[int], v: Sequence[int], p: int) -> Vector:
    return tuple((x + y) % p for x, y in zip(u, v))


def scale_mod(t: int, v: Sequence[int], p: int) -> Vector:
    return tuple((t * x) % p for x in v)


def centered(v: Sequence[int], p: int) -> Vector:
    """Representative with every coordinate in (-p/2, p/2]."""
    out = []
    for x in v:
        c = x % p
        if 2 * c > p:
            c -= p
        out.append(c)
    return tuple(out)


def inf_norm(v: Iterable[int]) -> int:
    return max((abs(x) for x in v), default=0)


@dataclass(frozen=True)
class SubgroupSet:
    """An explicitly enumerated subgroup of (Z/pZ)^n."""

    p: int
    n: int
    elements: tuple[Vector, ...]
    generators: tuple[Vector, ...] = ()

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, v) -> bool:
        return reduce_vector(v, self.p) in self._as_set()

    def _as_set(self) -> frozenset[Vector]:
        cache = self.__dict__.get("_set")
        if cache is None:
            cache = frozenset(self.elements)
            object.__setattr__(self, "_set", cache)
        return cache

    def is_subgroup(self) -> bool:
        """Closure under addition and presence of zero."""
        s = self._as_set()
        zero = (0,) * self.n
        if zero not in s:
            return False
        return all(add_mod(u, v, self.p) in s for u in self.elements for v in self.elements)

    def nonzero(self) -> Iterable[Vector]:
        zero = (0,) * self.n
        return (v for v in self.elements if v != zero)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "size": len(self.elements),
            "generators": [list(g) for g in self.generators],
            "elements": [list(v) for v in self.elements],
        }


def closure(generators: Iterable[Sequence[int]], p: int, n: int, cap: int = DEFAULT_ENUM_CAP) -> SubgroupSet:
    """Subgroup generated by ``generators``, by breadth-first closure."""
    gens = []
    for g in generators:
        g = reduce_vector(g, p)
        if len(g) != n:
            raise ValueError(f"generator {g} does not have length {n}")
        if any(g) and g not in gens:
            gens.append(g)
    zero = (0,) * n
    seen = {zero}
    order = [zero]
    queue = deque([zero])
    while queue:
        v = queue.popleft()
        for g in gens:
            w = add_mod(v, g, p)
            if w not in seen:
                if len(seen) >= cap:
                    raise CapacityError(f"subgroup enumeration exceeds cap {cap}")
                seen.add(w)
                order.append(w)
                queue.append(w)
    return SubgroupSet(p, n, tuple(sorted(order)), tuple(gens))
