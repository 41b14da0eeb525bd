"""The (n, k, b, r, s) lattice family and its perturbed variant.

Every matrix here is built from explicit integer entry formulas; the
``D M D`` factorizations are kept only as cross-checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact import (
    DEFAULT_P0_CAP,
    CapacityError,
    Matrix,
    det,
    inverse,
    is_p0,
    to_scalar,
)


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class ConstructionParams:
    n: int
    k: int
    b: int
    r: int
    s: int

    def __post_init__(self):
        for name in ("n", "k", "b", "r", "s"):
            if not isinstance(getattr(self, name), int):
                raise ParameterError(f"{name} must be an integer")
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if self.k < 1:
            raise ParameterError("k must be >= 1")
        if self.b < 1:
            raise ParameterError("b must be >= 1")
        if self.r < 0:
            raise ParameterError("r must be >= 0")
        if self.s < 0:
            raise ParameterError("s must be >= 0")
        if self.r > self.b:
            raise ParameterError("r must be <= b")

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.n, self.k, self.b, self.r, self.s)


@dataclass(frozen=True)
class DerivedTriple:
    a: int
    p: int
    q: int


def _exact_div(num: int, den: int, what: str) -> int:
    quo, rem = divmod(num, den)
    if rem:
        raise ArithmeticError(f"{what} is not an integer: {num}/{den}")
    return quo


def derive(params: ConstructionParams) -> DerivedTriple:
    """Compute ``a``, ``p``, ``q`` and check the defining identities."""
    n, k, b, r, s = params.as_tuple()
    a = k * b**n + s * b + r
    den = r + k * b**n
    p = _exact_div(s**n * r + k * a**n, den, "p")
    q = _exact_div(s ** (n - 1) * r + k * b * a ** (n - 1), den, "q")
    if q < 1:
        raise ArithmeticError(f"q = {q} < 1")
    if p != q * s + k * a ** (n - 1):
        raise ArithmeticError("identity p = qs + k a^(n-1) fails")
    if p * b != q * a - r * s ** (n - 1):
        raise ArithmeticError("identity pb = qa - r s^(n-1) fails")
    if p * b > a * q:
        raise ArithmeticError("p/q exceeds a/b")
    # the M_alpha parameter r s^n / (k a^n) of X must lie in [0, 1]
    if r * s**n > k * a**n:
        raise ArithmeticError("r s^n exceeds k a^n")
    return DerivedTriple(a, p, q)


def build_m_alpha(n: int, alpha) -> Matrix:
    alpha = to_scalar(alpha)
    return Matrix([[alpha if i < j else (-1 if i > j else 0) for j in range(n)] for i in range(n)])


def build_r_alpha(n: int, alpha) -> Matrix:
    """Companion-like matrix: ones on the subdiagonal, ``-alpha`` top right."""
    alpha = to_scalar(alpha)
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    rows[0][n - 1] += -alpha
    return Matrix(rows)


def build_d(n: int, beta) -> Matrix:
    beta = to_scalar(beta)
    return Matrix.diag([beta**i for i in range(n)])


def check_det_identity(n: int, x, y, alpha) -> bool:
    """``det(x R_alpha + y I) == (-x)^n alpha + y^n``, evaluated exactly."""
    x, y, alpha = to_scalar(x), to_scalar(y), to_scalar(alpha)
    lhs = det(build_r_alpha(n, alpha).scale(x).add_scalar_identity(y))
    rhs = (-x) ** n * alpha + y**n
    return lhs == rhs


def _pow(base: int, e: int) -> int:
    # 0**0 == 1 in Python already; negative exponents never occur for valid (i, j)
    if e < 0:
        raise ValueError("negative exponent")
    return base**e


def build_xy(params: ConstructionParams) -> tuple[Matrix, Matrix]:
    n, k, b, r, s = params.as_tuple()
    a = k * b**n + s * b + r
    X = [[0] * n for _ in range(n)]
    Y = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i < j:
                X[i][j] = r * _pow(a, j - i - 1) * _pow(s, n - (j - i + 1))
                Y[i][j] = -r * _pow(b, j - i - 1)
            elif i > j:
                X[i][j] = -k * _pow(a, n - (i - j + 1)) * _pow(s, i - j - 1)
                Y[i][j] = k * _pow(b, n - (i - j + 1))
    return Matrix(X), Matrix(Y)


def build_xy_factored(params: ConstructionParams) -> tuple[Matrix, Matrix]:
    """X and Y through the diagonal-similarity form; needs ``s >= 1``."""
    n, k, b, r, s = params.as_tuple()
    if s < 1:
        raise ParameterError("factored form is undefined for s = 0")
    a = k * b**n + s * b + r
    X = build_d(n, Fraction(s, a)) @ build_m_alpha(n, Fraction(r * s**n, k * a**n)) @ build_d(n, Fraction(a, s))
    X = X.scale(Fraction(k * a ** (n - 1), s))
    Y = build_d(n, Fraction(1, b)) @ build_m_alpha(n, Fraction(r, k * b**n)) @ build_d(n, b)
    Y = Y.scale(-k * b ** (n - 1))
    return X, Y


def build_ab(params: ConstructionParams) -> tuple[Matrix, Matrix]:
    t = derive(params)
    X, Y = build_xy(params)
    diag_b = _exact_div(t.a - params.r, params.b, "(a - r)/b")
    return X.add_scalar_identity(t.q), Y.add_scalar_identity(diag_b)


CHECK_PASS = "pass"
CHECK_FAIL = "fail"
CHECK_SKIPPED = "skipped"


@dataclass
class VerificationReport:
    """Outcome of the algebraic and lattice checks on one matrix pair."""

    params: dict
    a: int | None
    p: int
    q: int
    checks: dict[str, str] = field(default_factory=dict)
    lambda_inf: int | None = None
    detail: dict = field(default_factory=dict)

    required: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        """No check failed and every required check passed outright."""
        if any(v == CHECK_FAIL for v in self.checks.values()):
            return False
        return all(self.checks.get(name) in (CHECK_PASS, "implied") for name in self.required)

    @property
    def verdict(self) -> str:
        return "VALID" if self.valid else "INVALID"

    def to_json(self) -> dict:
        out = {
            "params": self.params,
            "a": self.a,
            "p": self.p,
            "q": self.q if isinstance(self.q, int) else str(self.q),
            "checks": dict(self.checks),
            "lambda_inf": self.lambda_inf,
            "verdict": self.verdict,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


def _verdict(ok: bool) -> str:
    return CHECK_PASS if ok else CHECK_FAIL


def verify_family(
    params: ConstructionParams,
    p0_cap: int = DEFAULT_P0_CAP,
    independence_cap: int | None = None,
) -> VerificationReport:
    """Run every certificate check for one parameter tuple.

    The P0 test on ``X`` and the direct minimum-distance computation on
    ``L(A)`` are independent routes to ``lambda_inf >= q``; both run when
    feasible.  Independence of the subgroup is enumerated when ``p`` is at
    most ``independence_cap``, and otherwise rests on ``lambda_inf >= q``.
    """
    from .lattice import DEFAULT_INDEPENDENCE_CAP, check_pair

    if independence_cap is None:
        independence_cap = DEFAULT_INDEPENDENCE_CAP
    t = derive(params)
    X, _ = build_xy(params)
    A, B = build_ab(params)
    report = VerificationReport(
        params=dict(zip("nkbrs", params.as_tuple())),
        a=t.a,
        p=t.p,
        q=t.q,
        required=("product", "det", "lambda_inf", "independence"),
    )
    try:
        report.checks["p0"] = _verdict(is_p0(X, p0_cap).holds)
    except CapacityError:
        report.checks["p0"] = CHECK_SKIPPED
    detB = det(B)
    report.detail["det_b"] = int(detB)
    pair = check_pair(A, B, t.p, t.q, independence_cap=independence_cap)
    report.checks["product"] = _verdict(pair.product_ok)
    report.checks["det"] = _verdict(detB == t.p)
    report.checks["lambda_inf"] = _verdict(pair.lambda_inf is not None and pair.lambda_inf >= t.q)
    report.checks["independence"] = pair.independence
    report.lambda_inf = pair.lambda_inf
    return report


@dataclass(frozen=True)
class Perturbation:
    d: int
    ell: int
    m: int
    p: int
    q: int | Fraction
    B: Matrix
    Bprime: Matrix
    Aprime: Matrix


def bohman_perturbation(d: int, ell: int) -> Perturbation:
    if d < 2:
        raise ParameterError("d must be >= 2")
    if ell < 1:
        raise ParameterError("ell must be >= 1")
    m = ell * 2**d + 2 ** (d - 1) + 1
    pp = ell * m ** (d - 1) + _exact_div(m ** (d - 2) * (m - 1), 2, "m^(d-2)(m-1)/2")
    # q' is an integer for d >= 3; d = 2 is kept as a rational so it can be reported
    qq = Fraction(2 * pp, m)
    if qq.denominator == 1:
        qq = int(qq)
    _, B = build_ab(ConstructionParams(d, ell, 2, 1, 2 ** (d - 2)))
    C = Matrix([[Fraction(1, 2) if i == j + 1 else 0 for j in range(d)] for i in range(d)])
    C_tilde = Matrix([[C[i, j] if i < d - 1 else 0 for j in range(d)] for i in range(d)])
    correction = (C_tilde @ inverse(Matrix.identity(d) - C)).scale(2 ** (d - 2))
    Bp = B + correction
    Ap = inverse(Bp).scale(pp)
    return Perturbation(d, ell, m, pp, qq, B, Bp, Ap)


def verify_perturbation(d: int, ell: int, p0_cap: int = DEFAULT_P0_CAP) -> VerificationReport:
    pert = bohman_perturbation(d, ell)
    report = VerificationReport(
        params={"d": d, "ell": ell, "m": pert.m},
        a=None,
        p=pert.p,
        q=pert.q,
        required=("product", "det", "integral", "p0"),
    )
    report.checks["product"] = _verdict(pert.Aprime @ pert.Bprime == Matrix.identity(d).scale(pert.p))
    detBp = det(pert.Bprime)
    report.detail["det_b"] = str(detBp)
    report.checks["det"] = _verdict(detBp == pert.p)
    report.checks["integral"] = _verdict(
        pert.Aprime.is_integral() and pert.Bprime.is_integral() and isinstance(pert.q, int)
    )
    try:
        report.checks["p0"] = _verdict(is_p0(pert.Aprime.add_scalar_identity(-pert.q), p0_cap).holds)
    except CapacityError:
        report.checks["p0"] = CHECK_SKIPPED
    # P0 of A' - q'I is the lambda_inf certificate here
    report.checks["lambda_inf"] = report.checks["p0"]
    return report
