"""Rank-one idempotents ``x ⊗ f`` with ``f(x) = 1``, their trace pairing and enumeration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import Field, Matrix, dot
from .errors import (CharTwo, DimensionMismatch, FieldMismatch, InfiniteField,
                     NotIdempotent, NotNormalized, ZeroInput)


@dataclass(frozen=True)
class RankOneIdempotent:
    """The idempotent ``y -> f(y) x``.

    Always held in canonical form: the first nonzero coordinate of ``x`` is 1.
    Build instances through :func:`make_idempotent` or :meth:`from_matrix`.
    """

    field: Field
    x: tuple
    f: tuple

    @property
    def n(self) -> int:
        return len(self.x)

    @cached_property
    def matrix(self) -> Matrix:
        return Matrix.outer(self.field, self.x, self.f)

    def key(self) -> tuple:
        """Sort key for the canonical lexicographic order on ``(x, f)``."""
        return (self.x, self.f)

    def is_symmetric(self) -> bool:
        return self.matrix.is_symmetric()

    def transpose(self) -> RankOneIdempotent:
        # (x ⊗ f)^t = f^t ⊗ x^t
        return make_idempotent(self.f, self.x, self.field)

    @classmethod
    def from_matrix(cls, M: Matrix) -> RankOneIdempotent:
        """Factor a rank-one idempotent matrix into canonical ``(x, f)``."""
        if M.is_zero():
            raise ZeroInput("zero matrix is not a rank-one idempotent")
        if M.rank() != 1 or M @ M != M:
            raise NotIdempotent(f"{M} is not a rank-one idempotent")
        F = M.field
        col = next(c for c in zip(*M.rows) if any(v != 0 for v in c))
        k = next(i for i, v in enumerate(col) if v != 0)
        x = tuple(F.div(v, col[k]) for v in col)
        # M = x ⊗ f with x[k] = 1, so row k of M is f
        return cls(F, x, M.rows[k])

    def to_json(self) -> dict:
        enc = self.field.encode
        return {"x": [enc(v) for v in self.x], "f": [enc(v) for v in self.f]}

    @classmethod
    def from_json(cls, data: dict, field: Field) -> RankOneIdempotent:
        return make_idempotent([field(v) for v in data["x"]],
                               [field(v) for v in data["f"]], field)

    def __repr__(self):
        enc = self.field.encode
        return f"Idem(x=({', '.join(map(enc, self.x))}), f=({', '.join(map(enc, self.f))}))"


def make_idempotent(x: Sequence, f: Sequence, field: Field, rescale: bool = False) -> RankOneIdempotent:
    """Build the canonical idempotent ``x ⊗ f``.

    Strict by default: ``f(x)`` must equal 1.  With ``rescale=True`` any
    invertible ``f(x)`` is accepted and ``f`` is divided by it.
    """
    if len(x) != len(f):
        raise DimensionMismatch(f"x has length {len(x)}, f has length {len(f)}")
    x = tuple(field(v) for v in x)
    f = tuple(field(v) for v in f)
    if all(v == 0 for v in x) or all(v == 0 for v in f):
        raise ZeroInput("x and f must both be nonzero")
    fx = dot(field, f, x)
    if fx == 0:
        raise NotIdempotent("f(x) = 0, so x ⊗ f is nilpotent")
    if fx != 1:
        if not rescale:
            raise NotNormalized(f"f(x) = {field.encode(fx)}, expected 1")
        inv = field.inv(fx)
        f = tuple(field.mul(v, inv) for v in f)
    lead = next(v for v in x if v != 0)
    if lead != 1:
        inv = field.inv(lead)
        x = tuple(field.mul(v, inv) for v in x)
        f = tuple(field.mul(v, lead) for v in f)
    return RankOneIdempotent(field, x, f)


def idempotent_matrix(P: RankOneIdempotent) -> Matrix:
    return P.matrix


def trace_pairing(P: RankOneIdempotent, Q: RankOneIdempotent):
    """``tr PQ``, computed as ``f_P(x_Q) * f_Q(x_P)``."""
    if P.field != Q.field:
        raise FieldMismatch(f"{P.field!r} vs {Q.field!r}")
    if P.n != Q.n:
        raise DimensionMismatch(f"{P.n} vs {Q.n}")
    F = P.field
    return F.mul(dot(F, P.f, Q.x), dot(F, Q.f, P.x))


def finite_rank_trace(field: Field, pairs: Sequence[tuple[Sequence, Sequence]]):
    """Trace of ``sum x_i ⊗ f_i`` evaluated as ``sum f_i(x_i)``."""
    dims = {len(x) for x, _ in pairs} | {len(f) for _, f in pairs}
    if len(dims) > 1:
        raise DimensionMismatch("all pairs must share one dimension")
    total = field.zero
    for x, f in pairs:
        total = field.add(total, dot(field, f, x))
    return total


def finite_rank_matrix(field: Field, n: int, pairs: Sequence[tuple[Sequence, Sequence]]) -> Matrix:
    """The matrix represented by ``sum x_i ⊗ f_i``."""
    M = Matrix.zeros(field, n)
    for x, f in pairs:
        M = M + Matrix.outer(field, x, f)
    return M


def projective_points(n: int, field: Field) -> list[tuple]:
    """Nonzero vectors with leading coordinate 1, in lexicographic order."""
    if not field.is_finite:
        raise InfiniteField("enumeration needs a finite field")
    q = field.char
    return [v for v in itertools.product(range(q), repeat=n)
            if next((c for c in v if c != 0), None) == 1]


def enumerate_idempotents(n: int, field: Field) -> list[RankOneIdempotent]:
    """All rank-one idempotents of ``M_n(GF(q))`` in canonical order.

    There are ``q**(n-1) * (q**n - 1) / (q - 1)`` of them.
    """
    if n < 1:
        raise ValueError("n must be positive")
    points = projective_points(n, field)
    covectors = list(itertools.product(range(field.char), repeat=n))
    out = []
    for x in points:
        for f in covectors:
            if dot(field, f, x) == 1:
                out.append(RankOneIdempotent(field, x, f))
    return out


def idempotent_count(n: int, q: int) -> int:
    return q ** (n - 1) * (q ** n - 1) // (q - 1)


def idempotent_arrays(n: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """``(X, F)`` integer arrays of the canonical enumeration, one idempotent per row.

    Same order as :func:`enumerate_idempotents`, built with numpy for large cases.
    """
    cov = np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64)
    lead = np.argmax(cov != 0, axis=1)
    nonzero = cov.any(axis=1)
    pts = cov[nonzero & (cov[np.arange(len(cov)), lead] == 1)]
    hits = (cov @ pts.T) % p == 1
    X = np.repeat(pts, hits.sum(axis=0), axis=0)
    F = np.concatenate([cov[hits[:, i]] for i in range(len(pts))])
    return X, F


def symmetric_from_vector(x: Sequence, field: Field) -> RankOneIdempotent:
    """``x xᵗ / (xᵗ x)``; raises :class:`NotIdempotent` when ``x`` is isotropic."""
    if field.char == 2:
        raise CharTwo("symmetric idempotents need characteristic != 2")
    x = tuple(field(v) for v in x)
    norm = dot(field, x, x)
    if norm == 0:
        raise NotIdempotent("isotropic vector: xᵗx = 0")
    inv = field.inv(norm)
    return make_idempotent(x, [field.mul(v, inv) for v in x], field)


def isotropic_directions(n: int, field: Field) -> list[tuple]:
    """Projective points with ``xᵗx = 0``; they carry no symmetric idempotent."""
    return [x for x in projective_points(n, field) if dot(field, x, x) == 0]


def enumerate_symmetric_idempotents(n: int, field: Field) -> list[RankOneIdempotent]:
    """All symmetric rank-one idempotents ``x xᵗ / (xᵗ x)`` over GF(q), canonical order.

    Isotropic directions are skipped; see :func:`isotropic_directions`.
    """
    if not field.is_finite:
        raise InfiniteField("enumeration needs a finite field")
    if field.char == 2:
        raise CharTwo("symmetric idempotents need characteristic != 2")
    out = [symmetric_from_vector(x, field) for x in projective_points(n, field)
           if dot(field, x, x) != 0]
    return sorted(out, key=RankOneIdempotent.key)


def unit_idempotent(field: Field, n: int, i: int, j: int | None = None) -> RankOneIdempotent:
    """``E_ii`` or, given ``j != i``, ``E_ii + E_ij``."""
    x = [field.zero] * n
    x[i] = field.one
    f = [field.zero] * n
    f[i] = field.one
    if j is not None and j != i:
        f[j] = field.one
    return make_idempotent(x, f, field)


def symmetric_pair_idempotent(field: Field, n: int, i: int, j: int) -> RankOneIdempotent:
    """``(E_ii + E_jj + E_ij + E_ji) / 2`` for ``i != j``."""
    x = [field.zero] * n
    x[i] = x[j] = field.one
    return symmetric_from_vector(x, field)
