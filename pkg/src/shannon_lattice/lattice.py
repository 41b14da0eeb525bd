"""p-ary lattices, their minimum infinity-norm distance, and bound certificates."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .exact import CapacityError, Matrix, SingularMatrixError, det, inverse
from .groups import DEFAULT_ENUM_CAP, SubgroupSet, centered, closure, inf_norm

# above this subgroup size independence is taken from lambda_inf >= q
DEFAULT_INDEPENDENCE_CAP = 5000
DEFAULT_BOX_CAP = 10**7


@dataclass(frozen=True)
class PAryLattice:
    """The lattice spanned by the columns of ``basis``, with p Z^n inside it."""

    basis: Matrix
    p: int
    certificate: Matrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("modulus must be >= 1")
        if not self.basis.is_integral():
            raise ValueError("basis must have integer entries")
        try:
            cert = inverse(self.basis).scale(self.p)
        except SingularMatrixError:
            raise ValueError("basis is singular") from None
        if not cert.is_integral():
            raise ValueError(f"p Z^n is not contained in the lattice for p = {self.p}")
        object.__setattr__(self, "certificate", cert)

    @classmethod
    def from_pair(cls, A: Matrix, B: Matrix, p: int) -> "PAryLattice":
        if A @ B != Matrix.identity(A.n).scale(p):
            raise ValueError("A B != p I")
        return cls(A, p)

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def index(self) -> int:
        """``|Lambda / p Z^n|``, which equals ``|det B|``."""
        return abs(int(det(self.certificate)))


def reduce_mod_p(A: Matrix, p: int, cap: int = DEFAULT_ENUM_CAP) -> SubgroupSet:
    """The image of L(A) in (Z/pZ)^n."""
    cols = [[int(x) for x in A.column(j)] for j in range(A.n)]
    return closure(cols, p, A.n, cap)


def lambda_inf(L: PAryLattice, cap: int = DEFAULT_ENUM_CAP) -> int:
    """Minimum infinity norm over nonzero lattice vectors, by scanning cosets.

    Each nonzero coset of p Z^n contributes its centered representative,
    which minimizes the infinity norm coordinate by coordinate; the zero
    coset contributes p.
    """
    S = reduce_mod_p(L.basis, L.p, cap)
    best = L.p
    for s in S.nonzero():
        best = min(best, inf_norm(centered(s, L.p)))
    return best


def lambda_inf_enum(L: PAryLattice, cap: int = DEFAULT_BOX_CAP) -> int:
    """Minimum infinity norm by enumerating a bounded box of coefficients.

    If ``v = A x`` has ``|v|_inf <= R`` then ``x = B v / p`` gives
    ``|x_j| <= R * |row_j(B)|_1 / p``.  ``R`` starts at the smallest basis
    column norm (or p), so the box always contains a minimizer.  Works for
    any p; cost depends only on how far A is from diagonal dominance.
    """
    n, p = L.n, L.p
    A = L.basis.to_int_rows()
    B = L.certificate.to_int_rows()
    cols = [[A[i][j] for i in range(n)] for j in range(n)]
    bound = min([p] + [inf_norm(c) for c in cols])
    radii = [bound * sum(abs(x) for x in row) // p for row in B]
    size = 1
    for c in radii:
        size *= 2 * c + 1
    if size > cap:
        raise CapacityError(f"coefficient box of {size} points exceeds cap {cap}")
    best = bound
    ranges = [range(-c, c + 1) for c in radii]
    for x in itertools.product(*ranges):
        # x and -x give the same norm; keep the half whose first nonzero entry is positive
        lead = next((t for t in x if t), 0)
        if lead <= 0:
            continue
        m = 0
        for i in range(n):
            row = A[i]
            vi = 0
            for j in range(n):
                if x[j]:
                    vi += row[j] * x[j]
            if vi < 0:
                vi = -vi
            if vi > m:
                m = vi
                if m >= best:
                    break
        if m < best:
            best = m
    return best


INDEPENDENT = "pass"
DEPENDENT = "fail"
IMPLIED = "implied"
SKIPPED = "skipped"


@dataclass
class PairCheck:
    product_ok: bool
    det_b: int
    lambda_inf: int | None
    independence: str
    subgroup: SubgroupSet | None = None
    lambda_agree: bool | None = None


def check_pair(
    A: Matrix,
    B: Matrix,
    p: int,
    q: int,
    independence_cap: int = DEFAULT_INDEPENDENCE_CAP,
    box_cap: int = DEFAULT_BOX_CAP,
) -> PairCheck:
    """Shared core of :func:`certify` and the family verifier."""
    from .graphs import FractionGraphPower, is_independent

    n = A.n
    product_ok = A.is_integral() and B.is_integral() and A @ B == Matrix.identity(n).scale(p)
    det_b = det(B)
    result = PairCheck(product_ok, int(det_b) if det_b.denominator == 1 else det_b, None, SKIPPED)
    if not product_ok:
        return result
    L = PAryLattice(A, p)
    lam = lambda_inf_enum(L, box_cap)
    result.lambda_inf = lam
    if abs(det_b) <= independence_cap:
        S = reduce_mod_p(A, p, cap=independence_cap + 1)
        result.subgroup = S
        scan = p
        for s in S.nonzero():
            scan = min(scan, inf_norm(centered(s, p)))
        result.lambda_agree = scan == lam
        if not result.lambda_agree:
            result.lambda_inf = None
        ok = len(S) == abs(det_b) and is_independent(FractionGraphPower(p, q, n), S)
        result.independence = INDEPENDENT if ok else DEPENDENT
    else:
        # the lattice argument: lambda_inf >= q makes the image independent
        result.independence = IMPLIED if lam >= q else DEPENDENT
    return result


@dataclass
class BoundCertificate:
    """A checked claim ``alpha_grp(E_{p/q}^n) >= |det B|``."""

    n: int
    p: int
    q: int
    det_b: int
    lambda_inf: int | None
    independent: bool
    independence_method: str
    failed: list[str]
    subgroup: SubgroupSet | None = None

    @property
    def valid(self) -> bool:
        return not self.failed

    @property
    def verdict(self) -> str:
        return "VALID" if self.valid else "INVALID"

    @property
    def bound(self) -> int:
        return abs(self.det_b)

    def statement(self) -> str:
        return f"alpha_grp(E_{{{self.p}/{self.q}}}^{self.n}) >= {self.bound}"

    def to_json(self, with_elements: bool = False) -> dict:
        out = {
            "n": self.n,
            "p": self.p,
            "q": self.q,
            "detB": self.det_b,
            "lambda_inf": self.lambda_inf,
            "independent": self.independent,
            "independence_method": self.independence_method,
            "verdict": self.verdict,
            "failed": list(self.failed),
            "claim": self.statement(),
        }
        if with_elements and self.subgroup is not None:
            out["subgroup"] = self.subgroup.to_json()
        return out


def certify(
    A: Matrix,
    B: Matrix,
    p: int,
    q: int,
    independence_cap: int = DEFAULT_INDEPENDENCE_CAP,
    box_cap: int = DEFAULT_BOX_CAP,
) -> BoundCertificate:
    if A.n != B.n:
        raise ValueError("A and B must have the same order")
    pc = check_pair(A, B, p, q, independence_cap, box_cap)
    failed = []
    if not pc.product_ok:
        failed.append("product")
    if pc.lambda_inf is None or pc.lambda_inf < q:
        failed.append("lambda_inf")
    if pc.independence in (DEPENDENT, SKIPPED):
        failed.append("independence")
    method = {INDEPENDENT: "enumerated", DEPENDENT: "enumerated", IMPLIED: "lattice", SKIPPED: "none"}[pc.independence]
    det_b = pc.det_b if isinstance(pc.det_b, int) else 0
    if not isinstance(pc.det_b, int):
        failed.append("det")
    return BoundCertificate(
        n=A.n,
        p=p,
        q=q,
        det_b=det_b,
        lambda_inf=pc.lambda_inf,
        independent=pc.independence in (INDEPENDENT, IMPLIED),
        independence_method=method,
        failed=failed,
        subgroup=pc.subgroup,
    )
