"""Numerics for the large-ratio limit: the gap function, its bound, tables and scans."""
from __future__ import annotations

import concurrent.futures
import contextlib
import csv
import io
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath.libmp import to_rational

from .construction import ConstructionParams, ParameterError, derive, verify_family

DEFAULT_DPS = 60
PARETO_BUCKET = Fraction(1, 1000)


@dataclass(frozen=True)
class DeltaRecord:
    """``a/b - ((r/k s^n + a^n) / (r/k + b^n))^(1/n)`` for one tuple.

    ``interval`` encloses the true value; ``certified`` says its upper end
    is at most ``bound``.  ``exact_check`` decides the same comparison in
    rational arithmetic, by raising both sides to the n-th power.
    """

    params: tuple[int, int, int, int, int]
    ratio: Fraction
    inner: Fraction
    interval: mpmath.ctx_iv.ivmpf = field(repr=False)
    bound: Fraction
    hypotheses_met: bool
    certified: bool
    exact_check: bool
    dps: int = DEFAULT_DPS

    @property
    def value(self) -> mpmath.mpf:
        lo, hi = endpoints(self.interval)
        mid = (lo + hi) / 2
        with mpmath.workdps(self.dps):
            return mpmath.mpf(mid.numerator) / mid.denominator

    @property
    def upper(self) -> Fraction:
        return endpoints(self.interval)[1]

    def to_json(self) -> dict:
        return {
            "params": list(self.params),
            "ratio": str(self.ratio),
            "delta": mpmath.nstr(self.value, 20),
            "delta_upper": mpmath.nstr(_mpf(self.upper, self.dps), 20),
            "bound": str(self.bound),
            "hypotheses_met": self.hypotheses_met,
            "certified": self.certified,
        }


@contextlib.contextmanager
def _iv_precision(dps: int):
    saved = mpmath.iv.dps
    mpmath.iv.dps = dps
    try:
        yield mpmath.iv
    finally:
        mpmath.iv.dps = saved


def _iv(x: Fraction):
    return mpmath.iv.mpf(x.numerator) / x.denominator


def endpoints(v) -> tuple[Fraction, Fraction]:
    """Exact end points of an interval, independent of the current precision."""
    lo, hi = v._mpi_
    return Fraction(*to_rational(lo)), Fraction(*to_rational(hi))


def _mpf(x: Fraction, dps: int) -> mpmath.mpf:
    with mpmath.workdps(dps):
        return mpmath.mpf(x.numerator) / x.denominator


def _as_fraction(v: mpmath.mpf) -> Fraction:
    man, exp = v.man_exp
    return Fraction(man) * Fraction(2) ** exp


def _int_root(v: int, n: int) -> int | None:
    with mpmath.workdps(len(str(v)) // n + 20):
        c = int(mpmath.nint(mpmath.root(v, n)))
    return c if c**n == v else None


def exact_root(x: Fraction, n: int) -> Fraction | None:
    """``x^(1/n)`` when it is rational, else None."""
    num = _int_root(x.numerator, n)
    den = _int_root(x.denominator, n)
    return None if num is None or den is None else Fraction(num, den)


def nth_root_interval(x: Fraction, n: int, dps: int = DEFAULT_DPS):
    """Interval around ``x^(1/n)`` whose end points are checked in exact arithmetic."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("x must be >= 0")
    exact = exact_root(x, n)
    if exact is not None:
        with _iv_precision(dps + 10) as iv:
            return _iv(exact)
    with mpmath.workdps(dps + 10):
        y = mpmath.root(mpmath.mpf(x.numerator) / x.denominator, n)
        eps = mpmath.mpf(10) ** (-dps)
        lo = max(y - eps, mpmath.mpf(0))
        hi = y + eps
    if not (_as_fraction(lo) ** n <= x <= _as_fraction(hi) ** n):
        raise ArithmeticError("root enclosure failed")
    with _iv_precision(dps + 10) as iv:
        return iv.mpf([lo, hi])


def _root_at_least(x: Fraction, n: int, t: Fraction) -> bool:
    """Exact test of ``x^(1/n) >= t`` for ``x >= 0``."""
    return t <= 0 or t**n <= x


def hypotheses(n: int, k: int, b: int, r: int, s: int) -> bool:
    return n >= 1 and k >= 1 and b >= 1 and k <= b and 0 <= r <= b and 0 <= s <= b**n


def delta(params, dps: int = DEFAULT_DPS) -> DeltaRecord:
    n, k, b, r, s = params.as_tuple() if isinstance(params, ConstructionParams) else tuple(params)
    if n < 1 or k < 1 or b < 1:
        raise ParameterError("n, k, b must be >= 1")
    a = k * b**n + s * b + r
    ratio = Fraction(a, b)
    inner = Fraction(r * s**n + k * a**n, r + k * b**n)
    bound = Fraction(6 * b * b, n)
    with _iv_precision(dps):
        iv = _iv(ratio) - nth_root_interval(inner, n, dps)
    certified = endpoints(iv)[1] <= bound
    exact = _root_at_least(inner, n, ratio - bound)
    return DeltaRecord(
        params=(n, k, b, r, s),
        ratio=ratio,
        inner=inner,
        interval=iv,
        bound=bound,
        hypotheses_met=hypotheses(n, k, b, r, s),
        certified=bool(certified),
        exact_check=exact,
        dps=dps,
    )


# -- convergence table -------------------------------------------------------


def choose_b(epsilon: Fraction) -> int:
    """Least integer b with 1/epsilon < b <= 2/epsilon."""
    epsilon = Fraction(epsilon)
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    b = math.floor(1 / epsilon) + 1
    return max(b, 2)


@dataclass(frozen=True)
class ConvergenceRow:
    x: Fraction
    epsilon: Fraction
    b: int
    m: int
    r: int
    n_m: int
    params: tuple[int, int, int, int, int]
    a: int
    p: int
    q: int
    root: mpmath.ctx_iv.ivmpf = field(repr=False)
    gap: mpmath.ctx_iv.ivmpf = field(repr=False)
    delta: DeltaRecord = field(repr=False)
    gap_bound: Fraction
    degenerate: bool

    @property
    def n(self) -> int:
        return self.params[0]

    @property
    def gap_upper(self) -> mpmath.mpf:
        return _mpf(endpoints(self.gap)[1], DEFAULT_DPS)

    @property
    def within_bound(self) -> bool:
        """Gap below the guaranteed bound, decided in exact arithmetic."""
        # x - p^(1/n) < g  <=>  p^(1/n) > x - g
        t = self.x - self.gap_bound
        return t < 0 or t**self.n < self.p


def convergence_row(x, epsilon, dps: int = DEFAULT_DPS) -> ConvergenceRow:
    x = Fraction(x)
    epsilon = Fraction(epsilon)
    b = choose_b(epsilon)
    m = math.floor(x)
    if m < b:
        raise ValueError(f"x = {x} is below b = {b}; no n >= 1 has x >= b^n")
    r = math.floor(b * (x - m))
    n_m = 0
    while b ** (n_m + 1) <= m:
        n_m += 1
    params = ConstructionParams(n_m + 1, 1, b, r, m - b**n_m)
    t = derive(params)
    with _iv_precision(dps):
        root = nth_root_interval(Fraction(t.p), params.n, dps)
        gap = _iv(x) - root
    return ConvergenceRow(
        x=x,
        epsilon=epsilon,
        b=b,
        m=m,
        r=r,
        n_m=n_m,
        params=params.as_tuple(),
        a=t.a,
        p=t.p,
        q=t.q,
        root=root,
        gap=gap,
        delta=delta(params, dps),
        gap_bound=epsilon + Fraction(24) / (params.n * epsilon**2),
        degenerate=n_m <= 1,
    )


def convergence_table(x_values, epsilon, dps: int = DEFAULT_DPS) -> list[ConvergenceRow]:
    return [convergence_row(x, epsilon, dps) for x in x_values]


CONVERGENCE_COLUMNS = [
    "x", "epsilon", "b", "m", "r", "n_m", "n", "k", "s", "a", "p", "q",
    "root_lower", "gap_upper", "delta", "gap_bound", "within_bound", "degenerate",
]


def convergence_csv(rows: list[ConvergenceRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CONVERGENCE_COLUMNS)
    for row in rows:
        n, k, _, _, s = row.params
        w.writerow([
            row.x, row.epsilon, row.b, row.m, row.r, row.n_m, n, k, s, row.a, row.p, row.q,
            mpmath.nstr(_mpf(endpoints(row.root)[0], 20), 15),
            mpmath.nstr(row.gap_upper, 15),
            mpmath.nstr(row.delta.value, 15),
            row.gap_bound, int(row.within_bound), int(row.degenerate),
        ])
    return buf.getvalue()


# -- scan ----------------------------------------------------------------------

FAMILIES = {
    "purple": lambda b, r, s: s == 0 and b == 2 and r == 1,
    "green": lambda b, r, s: s == 1 and b == 2 and r == 1,
    "blue": lambda b, r, s: b == 1 and r == 1 and s == 1,
    "yellow": lambda b, r, s: s == 0,
}


def family_tags(b: int, r: int, s: int) -> list[str]:
    return [name for name, test in FAMILIES.items() if test(b, r, s)]


@dataclass(frozen=True)
class ScanLimits:
    n_max: int = 0
    k_max: int = 0
    b_max: int = 0
    s_max: int = 0


@dataclass
class ScanPoint:
    params: tuple[int, int, int, int, int]
    a: int
    p: int
    q: int
    root: mpmath.mpf
    tags: list[str]
    pareto: bool = False

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.p, self.q)

    def sort_key(self):
        return (self.ratio, self.params)


@dataclass
class ScanResult:
    points: list[ScanPoint]
    certified: list[tuple[int, int, int, int, int]] = field(default_factory=list)
    failed: list[tuple[int, int, int, int, int]] = field(default_factory=list)


def scan(
    limits: ScanLimits,
    window: tuple = (2, 7),
    certify_fraction: float = 0.05,
    seed: int = 0,
    dps: int = 30,
    workers: int = 1,
) -> ScanResult:
    """Certified points ``(p/q, p^(1/n))`` for every tuple within ``limits``.

    A seeded random sample of ``certify_fraction`` of the points is run
    through the full family verifier; ``certify_fraction=1`` checks all.
    The output does not depend on ``workers``.
    """
    lo, hi = Fraction(window[0]), Fraction(window[1])
    points = []
    for n in range(1, limits.n_max + 1):
        for k in range(1, limits.k_max + 1):
            for b in range(1, limits.b_max + 1):
                for r in range(0, b + 1):
                    for s in range(0, limits.s_max + 1):
                        t = derive(ConstructionParams(n, k, b, r, s))
                        if not lo <= Fraction(t.p, t.q) <= hi:
                            continue
                        with mpmath.workdps(dps):
                            root = mpmath.root(t.p, n)
                        points.append(ScanPoint((n, k, b, r, s), t.a, t.p, t.q, root, family_tags(b, r, s)))
    points.sort(key=ScanPoint.sort_key)
    _mark_pareto(points)
    result = ScanResult(points)
    rng = random.Random(seed)
    sample = [pt.params for pt in points if certify_fraction >= 1 or rng.random() < certify_fraction]
    if workers > 1 and len(sample) > 1:
        with concurrent.futures.ProcessPoolExecutor(workers) as pool:
            verdicts = list(pool.map(_certifies, sample, chunksize=16))
    else:
        verdicts = [_certifies(t) for t in sample]
    for params, ok in zip(sample, verdicts):
        (result.certified if ok else result.failed).append(params)
    return result


def _certifies(params: tuple[int, int, int, int, int]) -> bool:
    return verify_family(ConstructionParams(*params)).valid


def _mark_pareto(points: list[ScanPoint]) -> None:
    best: dict[int, ScanPoint] = {}
    for pt in points:
        key = math.floor(pt.ratio / PARETO_BUCKET)
        cur = best.get(key)
        if cur is None or pt.root > cur.root:
            best[key] = pt
    for pt in best.values():
        pt.pareto = True


SCAN_COLUMNS = [
    "ratio_num", "ratio_den", "n", "k", "b", "r", "s", "a", "p", "q",
    "bound_root", "family_tags", "pareto", "upper_ref",
]


def scan_csv(points: list[ScanPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for pt in points:
        ratio = pt.ratio
        w.writerow([
            ratio.numerator, ratio.denominator, *pt.params, pt.a, pt.p, pt.q,
            mpmath.nstr(pt.root, 12),
            ";".join(pt.tags),
            int(pt.pareto),
            mpmath.nstr(mpmath.mpf(ratio.numerator) / ratio.denominator, 12),
        ])
    return buf.getvalue()
