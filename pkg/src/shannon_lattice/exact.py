"""Exact square-matrix linear algebra over the rationals.

Entries are stored as :class:`fractions.Fraction`; nothing here ever touches a
float.  Indices are 0-based throughout the Python API.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Scalar = Fraction

DEFAULT_P0_CAP = 20


class CapacityError(RuntimeError):
    """An enumeration would exceed its configured cap."""


class SingularMatrixError(ArithmeticError):
    pass


def to_scalar(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact scalars")
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


class Matrix:
    """Immutable square matrix with exact rational entries."""

    __slots__ = ("_rows", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(to_scalar(x) for x in row) for row in rows)
        n = len(data)
        if n == 0:
            raise ValueError("matrix order must be at least 1")
        for row in data:
            if len(row) != n:
                raise ValueError(f"matrix is not square: row of length {len(row)} in order {n}")
        self._rows = data
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls.diag([1] * n)

    @classmethod
    def zeros(cls, n: int) -> "Matrix":
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def diag(cls, values: Sequence) -> "Matrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self._rows)

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._rows[i][j]

    def __iter__(self) -> Iterator[tuple[Fraction, ...]]:
        return iter(self._rows)

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self._rows)

    def transpose(self) -> "Matrix":
        return Matrix(zip(*self._rows))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._rows)
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(_fmt(x) for x in row) + "]" for row in self._rows)
        return f"Matrix([{body}])"

    def _check_order(self, other: "Matrix") -> None:
        if other.n != self.n:
            raise ValueError(f"order mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_order(other)
        return Matrix([[x + y for x, y in zip(r, s)] for r, s in zip(self._rows, other._rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_order(other)
        return Matrix([[x - y for x, y in zip(r, s)] for r, s in zip(self._rows, other._rows)])

    def __neg__(self) -> "Matrix":
        return Matrix([[-x for x in r] for r in self._rows])

    def scale(self, c) -> "Matrix":
        c = to_scalar(c)
        return Matrix([[c * x for x in r] for r in self._rows])

    def __mul__(self, c) -> "Matrix":
        if isinstance(c, Matrix):
            return self @ c
        return self.scale(c)

    __rmul__ = scale

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check_order(other)
        cols = list(zip(*other._rows))
        return Matrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._rows])

    def apply(self, v: Sequence) -> tuple[Fraction, ...]:
        """Matrix-vector product ``M v``."""
        if len(v) != self.n:
            raise ValueError("vector length does not match matrix order")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self._rows)

    def add_scalar_identity(self, c) -> "Matrix":
        """``M + c I``."""
        c = to_scalar(c)
        return Matrix([[x + c if i == j else x for j, x in enumerate(r)] for i, r in enumerate(self._rows)])

    def submatrix(self, S: Iterable[int]) -> "Matrix | None":
        """Principal submatrix on the index set ``S`` (``None`` for the empty set)."""
        idx = sorted(set(S))
        for i in idx:
            if not 0 <= i < self.n:
                raise IndexError(f"index {i} out of range for order {self.n}")
        if not idx:
            return None
        return Matrix([[self._rows[i][j] for j in idx] for i in idx])

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self._rows for x in r)

    def to_int_rows(self) -> list[list[int]]:
        if not self.is_integral():
            raise ValueError("matrix has non-integer entries")
        return [[x.numerator for x in r] for r in self._rows]

    def to_json(self) -> list[list]:
        return [[x.numerator if x.denominator == 1 else str(x) for x in r] for r in self._rows]


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    a = [list(r) for r in rows]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                # exact by Sylvester's identity
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det(M: Matrix) -> Fraction:
    """Exact determinant.

    Rows are cleared of denominators first so the elimination runs on
    integers.
    """
    scale = 1
    int_rows = []
    for row in M.rows:
        l = math.lcm(*(x.denominator for x in row))
        scale *= l
        int_rows.append([x.numerator * (l // x.denominator) for x in row])
    return Fraction(bareiss_det(int_rows), scale)


def principal_minor(M: Matrix, S: Iterable[int]) -> Fraction:
    sub = M.submatrix(S)
    if sub is None:
        return Fraction(1)
    return det(sub)


@dataclass(frozen=True)
class P0Result:
    holds: bool
    witness: tuple[int, ...] | None = None
    minor: Fraction | None = None

    def __bool__(self) -> bool:
        return self.holds


def _subsets_lex(n: int) -> Iterator[tuple[int, ...]]:
    # nonempty subsets of range(n) as sorted tuples, in lexicographic order
    stack: list[tuple[int, ...]] = [(i,) for i in range(n - 1, -1, -1)]
    while stack:
        s = stack.pop()
        yield s
        stack.extend(s + (j,) for j in range(n - 1, s[-1], -1))


def is_p0(M: Matrix, cap: int = DEFAULT_P0_CAP) -> P0Result:
    """Check that every principal minor of ``M`` is nonnegative.

    Subsets are visited in lexicographic order, so a failing result carries
    the lexicographically least violating index set.
    """
    if M.n > cap:
        raise CapacityError(f"P0 test on order {M.n} exceeds cap {cap} (2^{M.n} minors)")
    for S in _subsets_lex(M.n):
        m = principal_minor(M, S)
        if m < 0:
            return P0Result(False, S, m)
    return P0Result(True)


def inverse(M: Matrix) -> Matrix:
    """Exact inverse by Gauss-Jordan elimination over the rationals."""
    n = M.n
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M.rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv_p = 1 / a[col][col]
        a[col] = [x * inv_p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return Matrix([row[n:] for row in a])


def parse_matrix(text: str) -> Matrix:
    """Parse the plain-text matrix format.

    The first non-blank line holds the order ``n``; the next ``n`` non-blank
    lines hold whitespace-separated entries, each an integer or ``a/b``.
    Lines starting with ``#`` are ignored.  Errors name the offending line.
    """
    lines = [(k, ln.strip()) for k, ln in enumerate(text.splitlines(), 1)]
    lines = [(k, ln) for k, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    k0, head = lines[0]
    try:
        n = int(head)
    except ValueError:
        raise ValueError(f"line {k0}: expected matrix order, got {head!r}") from None
    if n < 1:
        raise ValueError(f"line {k0}: matrix order must be positive")
    body = lines[1:]
    if len(body) != n:
        raise ValueError(f"expected {n} rows after line {k0}, found {len(body)}")
    rows = []
    for k, ln in body:
        toks = ln.split()
        if len(toks) != n:
            raise ValueError(f"line {k}: expected {n} entries, found {len(toks)}")
        try:
            rows.append([Fraction(t) for t in toks])
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"line {k}: bad entry in {ln!r}") from None
    return Matrix(rows)


def format_matrix(M: Matrix) -> str:
    lines = [str(M.n)]
    lines += [" ".join(_fmt(x) for x in row) for row in M.rows]
    return "\n".join(lines) + "\n"
