"""Exact scalar and dense matrix arithmetic over GF(p) and the rationals.

Field elements are plain Python values: ``int`` residues in ``[0, p)`` for
GF(p) and ``fractions.Fraction`` for the rationals.  A :class:`Field` knows how
to reduce, invert, parse and print them; :class:`Matrix` is an immutable square
array bound to one field.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from sympy import isprime

from .errors import DimensionMismatch, DivisionByZero, FieldMismatch, Singular


@dataclass(frozen=True)
class Field:
    """A prime field GF(p), or the rationals when ``char == 0``."""

    char: int

    def __post_init__(self):
        if not isinstance(self.char, int) or self.char < 0:
            raise ValueError(f"characteristic must be a non-negative int, got {self.char!r}")
        if self.char != 0 and not isprime(self.char):
            raise ValueError(f"characteristic {self.char} is not prime")

    def __repr__(self):
        return "QQ" if self.char == 0 else f"GF({self.char})"

    @property
    def is_finite(self) -> bool:
        return self.char != 0

    @property
    def order(self) -> int | None:
        return self.char or None

    @property
    def zero(self):
        return 0 if self.char else Fraction(0)

    @property
    def one(self):
        return 1 if self.char else Fraction(1)

    def __call__(self, value):
        """Coerce an int, Fraction or encoded string into this field."""
        if isinstance(value, str):
            return self.decode(value)
        if self.char == 0:
            return Fraction(value)
        if isinstance(value, Fraction):
            return self.div(value.numerator % self.char, value.denominator % self.char)
        if isinstance(value, bool):
            raise TypeError(f"cannot coerce {value!r} into {self!r}")
        return operator.index(value) % self.char

    def reduce(self, value):
        return value % self.char if self.char else value

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def neg(self, a):
        return self.reduce(-a)

    def mul(self, a, b):
        return self.reduce(a * b)

    def inv(self, a):
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in {self!r}")
        if self.char:
            return pow(a, -1, self.char)
        return 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def elements(self) -> list:
        if not self.char:
            raise ValueError("the rationals cannot be listed")
        return list(range(self.char))

    def sqrt(self, a):
        """Return a square root of ``a`` or ``None`` when there is none."""
        if self.char:
            for r in range(self.char):
                if r * r % self.char == a:
                    return r
            return None
        if a < 0:
            return None
        num, den = math.isqrt(a.numerator), math.isqrt(a.denominator)
        if num * num != a.numerator or den * den != a.denominator:
            return None
        return Fraction(num, den)

    def is_positive(self, a) -> bool:
        """Sign convention for gauge fixing: ``> 0`` over QQ, ``1..(p-1)/2`` over GF(p)."""
        if self.char:
            return 1 <= a <= (self.char - 1) // 2
        return a > 0

    def encode(self, a) -> str:
        if self.char:
            return str(a)
        return f"{a.numerator}/{a.denominator}"

    def decode(self, text: str):
        text = text.strip()
        if "/" in text:
            num, den = text.split("/")
            return self(Fraction(int(num), int(den)))
        return self(int(text))

    def to_json(self) -> dict:
        return {"char": self.char}

    @classmethod
    def from_json(cls, data: dict) -> Field:
        return cls(int(data["char"]))

    @classmethod
    def parse(cls, text: str) -> Field:
        """Parse ``rational`` or ``gf:<p>``."""
        text = text.strip().lower()
        if text in ("rational", "q", "qq"):
            return cls(0)
        if text.startswith("gf:"):
            return cls(int(text[3:]))
        raise ValueError(f"unknown field {text!r}")


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)


def scalar_inverse(field: Field, a):
    return field.inv(a)


def dot(field: Field, u: Sequence, v: Sequence):
    """The pairing f(y) of a covector with a vector."""
    if len(u) != len(v):
        raise DimensionMismatch(f"lengths {len(u)} and {len(v)} differ")
    return field.reduce(sum(a * b for a, b in zip(u, v)))


def _eliminate(field: Field, rows: list[list]) -> tuple[list[list], list[int]]:
    """Row-reduce in place with first-nonzero pivoting; return (rows, pivot columns)."""
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(v, inv) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [field.sub(a, field.mul(factor, b)) for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def row_rank(field: Field, rows: Iterable[Sequence]) -> int:
    """Rank of an arbitrary (possibly rectangular) list of rows."""
    rows = [list(row) for row in rows]
    if not rows:
        return 0
    return len(_eliminate(field, rows)[1])


@dataclass(frozen=True)
class Matrix:
    """An immutable square matrix over a :class:`Field`, stored row-major."""

    field: Field
    rows: tuple[tuple, ...]

    def __post_init__(self):
        n = len(self.rows)
        if any(len(row) != n for row in self.rows):
            raise DimensionMismatch("matrix must be square")

    @classmethod
    def from_rows(cls, field: Field, rows: Iterable[Iterable]) -> Matrix:
        return cls(field, tuple(tuple(field(v) for v in row) for row in rows))

    @classmethod
    def zeros(cls, field: Field, n: int) -> Matrix:
        return cls(field, tuple((field.zero,) * n for _ in range(n)))

    @classmethod
    def identity(cls, field: Field, n: int) -> Matrix:
        return cls(field, tuple(
            tuple(field.one if i == j else field.zero for j in range(n)) for i in range(n)))

    @classmethod
    def unit(cls, field: Field, n: int, i: int, j: int) -> Matrix:
        """The matrix unit with a single 1 at ``(i, j)`` (0-based)."""
        return cls(field, tuple(
            tuple(field.one if (a, b) == (i, j) else field.zero for b in range(n))
            for a in range(n)))

    @classmethod
    def outer(cls, field: Field, x: Sequence, f: Sequence) -> Matrix:
        """The matrix of ``x ⊗ f``, i.e. entries ``x[i] * f[j]``."""
        if len(x) != len(f):
            raise DimensionMismatch("vector and covector lengths differ")
        return cls(field, tuple(tuple(field.mul(a, b) for b in f) for a in x))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def _check(self, other: Matrix):
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if self.field != other.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
        if self.n != other.n:
            raise DimensionMismatch(f"{self.n} vs {other.n}")

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        F = self.field
        return Matrix(F, tuple(
            tuple(F.add(a, b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: Matrix) -> Matrix:
        self._check(other)
        F = self.field
        return Matrix(F, tuple(
            tuple(F.sub(a, b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> Matrix:
        return self.scale(self.field.neg(self.field.one))

    def scale(self, c) -> Matrix:
        F = self.field
        c = F(c)
        return Matrix(F, tuple(tuple(F.mul(c, a) for a in row) for row in self.rows))

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other)
        F = self.field
        cols = list(zip(*other.rows))
        return Matrix(F, tuple(
            tuple(F.reduce(sum(a * b for a, b in zip(row, col))) for col in cols)
            for row in self.rows))

    def apply(self, x: Sequence) -> tuple:
        """Matrix times column vector."""
        if len(x) != self.n:
            raise DimensionMismatch("vector length does not match matrix")
        return tuple(dot(self.field, row, x) for row in self.rows)

    def rapply(self, f: Sequence) -> tuple:
        """Row covector times matrix."""
        if len(f) != self.n:
            raise DimensionMismatch("covector length does not match matrix")
        return tuple(dot(self.field, f, col) for col in zip(*self.rows))

    @property
    def T(self) -> Matrix:
        return Matrix(self.field, tuple(zip(*self.rows)))

    def trace(self):
        return self.field.reduce(sum(self.rows[i][i] for i in range(self.n)))

    def rank(self) -> int:
        return row_rank(self.field, self.rows)

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.rows for v in row)

    def is_symmetric(self) -> bool:
        return self.rows == self.T.rows

    def vec(self) -> tuple:
        """Row-major flattening."""
        return tuple(v for row in self.rows for v in row)

    def first_nonzero(self):
        return next((v for v in self.vec() if v != 0), None)

    def normalized(self) -> Matrix:
        """Scale so that the first nonzero entry in row-major order is 1."""
        lead = self.first_nonzero()
        if lead is None:
            return self
        return self.scale(self.field.inv(lead))

    @cached_property
    def _inverse(self) -> Matrix:
        F, n = self.field, self.n
        aug = [list(row) + [F.one if i == j else F.zero for j in range(n)]
               for i, row in enumerate(self.rows)]
        aug, pivots = _eliminate(F, aug)
        if pivots[:n] != list(range(n)):
            raise Singular(f"matrix has rank {sum(p < n for p in pivots)} < {n}")
        return Matrix(F, tuple(tuple(row[n:]) for row in aug))

    def inverse(self) -> Matrix:
        return self._inverse

    def is_invertible(self) -> bool:
        return self.rank() == self.n

    def solve(self, b: Sequence) -> tuple:
        if len(b) != self.n:
            raise DimensionMismatch("right-hand side length does not match matrix")
        F, n = self.field, self.n
        aug = [list(row) + [F(v)] for row, v in zip(self.rows, b)]
        aug, pivots = _eliminate(F, aug)
        if pivots[:n] != list(range(n)):
            raise Singular("system matrix is singular")
        return tuple(row[n] for row in aug)

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "n": self.n,
            "entries": [[self.field.encode(v) for v in row] for row in self.rows],
        }

    @classmethod
    def from_json(cls, data: dict) -> Matrix:
        field = Field.from_json(data["field"])
        m = cls.from_rows(field, data["entries"])
        if m.n != int(data["n"]):
            raise DimensionMismatch(f"declared n={data['n']} but got {m.n} rows")
        return m

    def __str__(self):
        enc = self.field.encode
        return "[" + "; ".join(" ".join(enc(v) for v in row) for row in self.rows) + "]"


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    return A @ B


def mat_inverse(A: Matrix) -> Matrix:
    return A.inverse()


def mat_rank(A: Matrix) -> int:
    return A.rank()


def mat_trace(A: Matrix):
    return A.trace()


def solve_linear(A: Matrix, b: Sequence) -> tuple:
    return A.solve(b)
