"""Recover the implementing matrix of a rank-one idempotent preserver.

Full mode: ``Phi(X) = A X A^-1`` or ``Phi(X) = A Xᵗ A^-1`` with ``A`` fixed up
to a scalar.  Symmetric mode: ``Phi(X) = U X Uᵗ`` with ``U`` orthogonal, fixed
up to sign.  Every returned form is checked against ``Phi`` on the whole basis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .algebra import Field, Matrix
from .errors import (CharTwo, DimensionMismatch, NoSquareRoot, NotAPreserver, NotInnerForm,
                     NotOrthogonalForm, Singular, SingularCandidate)
from .extension import FULL, SYMMETRIC, LinearExtension, SymmetryMap
from .idempotents import RankOneIdempotent, make_idempotent


class Branch(enum.Enum):
    IDENTITY = "identity"
    TRANSPOSE = "transpose"


@dataclass(frozen=True)
class PreserverForm:
    """``P -> A P A^-1`` (identity branch) or ``P -> A Pᵗ A^-1`` (transpose branch)."""

    A: Matrix
    branch: Branch = Branch.IDENTITY

    @cached_property
    def A_inv(self) -> Matrix:
        return self.A.inverse()

    def matrix_map(self, X: Matrix) -> Matrix:
        if self.branch is Branch.TRANSPOSE:
            X = X.T
        return self.A @ X @ self.A_inv

    def extension(self) -> LinearExtension:
        F, n = self.A.field, self.A.n
        images = {(i, j): self.matrix_map(Matrix.unit(F, n, i, j)) for i in range(n) for j in range(n)}
        return LinearExtension(n, F, images, FULL)

    def to_json(self) -> dict:
        return {"branch": self.branch.value, "A": self.A.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> PreserverForm:
        return cls(Matrix.from_json(data["A"]), Branch(data["branch"]))


@dataclass(frozen=True)
class OrthogonalForm:
    """``P -> U P Uᵗ`` with ``Uᵗ U = I``."""

    U: Matrix

    @property
    def A_inv(self) -> Matrix:
        return self.U.T

    def matrix_map(self, X: Matrix) -> Matrix:
        return self.U @ X @ self.U.T

    def extension(self) -> LinearExtension:
        F, n = self.U.field, self.U.n
        images = {}
        for i in range(n):
            for j in range(i, n):
                E = Matrix.unit(F, n, i, j)
                if i != j:
                    E = E + E.T
                images[i, j] = self.matrix_map(E)
        return LinearExtension(n, F, images, SYMMETRIC)

    def to_json(self) -> dict:
        return {"U": self.U.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> OrthogonalForm:
        return cls(Matrix.from_json(data["U"]))


def _verify(Phi: LinearExtension, form) -> list[tuple[int, int]]:
    """Basis indices on which ``form`` disagrees with ``Phi``."""
    expected = form.extension().images
    return [k for k in Phi.basis_order() if Phi.images[k] != expected[k]]


def recover_conjugation(Phi: LinearExtension) -> Matrix:
    """Find ``A`` with ``Phi(X) = A X A^-1``, normalized so its first nonzero entry is 1.

    A nonzero column ``u`` of ``Phi(E_11)`` is a multiple of ``A e_1``, hence
    ``Phi(E_i1) u`` is the same multiple of ``A e_i``.
    """
    if Phi.mode != FULL:
        raise ValueError("recover_conjugation needs a full-mode extension")
    F, n = Phi.field, Phi.n
    cols = [c for c in zip(*Phi.images[0, 0].rows) if any(v != 0 for v in c)]
    if not cols:
        raise NotInnerForm("Phi(E_11) = 0")
    u = cols[0]
    columns = [Phi.images[i, 0].apply(u) for i in range(n)]
    A = Matrix(F, tuple(zip(*columns))).normalized()
    try:
        A.inverse()
    except Singular:
        raise SingularCandidate(f"assembled candidate {A} is singular") from None
    bad = _verify(Phi, PreserverForm(A))
    if bad:
        raise NotInnerForm(f"conjugation by {A} disagrees on E_ij for (i, j) in {bad}")
    return A


def decompose(Phi: LinearExtension) -> PreserverForm:
    """Identity branch first; on failure retry ``X -> Phi(Xᵗ)`` as the transpose branch."""
    if Phi.mode != FULL:
        raise ValueError("decompose needs a full-mode extension")
    if Phi.field.char == 2:
        raise CharTwo("characteristic 2 is outside the classification")
    try:
        return PreserverForm(recover_conjugation(Phi), Branch.IDENTITY)
    except NotAPreserver as first:
        try:
            return PreserverForm(recover_conjugation(Phi.transposed()), Branch.TRANSPOSE)
        except NotAPreserver as second:
            raise NotAPreserver(f"identity branch: {first}; transpose branch: {second}") from None


def _sign_normalize(U: Matrix) -> Matrix:
    F = U.field
    lead = next((v for v in (row[0] for row in U.rows) if v != 0), None)
    if lead is not None and not F.is_positive(lead):
        return -U
    return U


def recover_orthogonal(Phi: LinearExtension) -> OrthogonalForm:
    """Find orthogonal ``U`` with ``Phi(X) = U X Uᵗ`` on ``S_n``, up to global sign."""
    if Phi.mode != SYMMETRIC:
        raise ValueError("recover_orthogonal needs a symmetric-mode extension")
    F, n = Phi.field, Phi.n
    if F.char == 2:
        raise CharTwo("characteristic 2 is outside the classification")
    cols = []
    for i in range(n):
        S = Phi.images[i, i]
        k = next((k for k in range(n) if S[k, k] != 0), None)
        if k is None:
            raise NotOrthogonalForm(f"Phi(E_{i + 1}{i + 1}) has zero diagonal")
        root = F.sqrt(S[k, k])
        if root is None:
            raise NoSquareRoot(f"{F.encode(S[k, k])} is not a square in {F!r}")
        inv = F.inv(root)
        cols.append(tuple(F.mul(S[r, k], inv) for r in range(n)))

    half = F.inv(F(2))
    for j in range(1, n):
        # Phi((E_11 + E_jj + E_1j + E_j1)/2) = (u_1 + u_j)(u_1 + u_j)ᵗ / 2
        target = (Phi.images[0, j] + Phi.images[0, 0] + Phi.images[j, j]).scale(half)
        for sign in (F.one, F.neg(F.one)):
            w = tuple(F.add(a, F.mul(sign, b)) for a, b in zip(cols[0], cols[j]))
            if Matrix.outer(F, w, w).scale(half) == target:
                cols[j] = tuple(F.mul(sign, b) for b in cols[j])
                break
        else:
            raise NotOrthogonalForm(f"no sign for column {j + 1} matches the (1, {j + 1}) probe")

    U = _sign_normalize(Matrix(F, tuple(zip(*cols))))
    if U.T @ U != Matrix.identity(F, n):
        raise NotOrthogonalForm(f"candidate {U} is not orthogonal")
    form = OrthogonalForm(U)
    bad = _verify(Phi, form)
    if bad:
        raise NotOrthogonalForm(f"U X Uᵗ disagrees on basis elements {bad}")
    return form


def apply_form(form: PreserverForm | OrthogonalForm, P: RankOneIdempotent) -> RankOneIdempotent:
    """Image of ``P`` under the form, returned in canonical ``(x, f)`` form."""
    if isinstance(form, OrthogonalForm):
        A, A_inv, x, f = form.U, form.A_inv, P.x, P.f
    else:
        A, A_inv = form.A, form.A_inv
        # (x ⊗ f)ᵗ = fᵗ ⊗ xᵗ
        x, f = (P.f, P.x) if form.branch is Branch.TRANSPOSE else (P.x, P.f)
    if A.n != P.n:
        raise DimensionMismatch(f"form acts on dimension {A.n}, idempotent has {P.n}")
    return make_idempotent(A.apply(x), A_inv.rapply(f), A.field)


def form_map(form: PreserverForm | OrthogonalForm, n: int, field: Field,
             domain: Iterable[RankOneIdempotent] | None = None) -> SymmetryMap:
    """The symmetry map induced by ``form``, as an oracle or tabulated over ``domain``."""
    mode = SYMMETRIC if isinstance(form, OrthogonalForm) else FULL
    phi = SymmetryMap(n, field, lambda P: apply_form(form, P), mode)
    return phi if domain is None else phi.tabulate(domain)


def normalize(A: Matrix) -> Matrix:
    return A.normalized()


def forms_equal_up_to_scalar(A: Matrix, B: Matrix) -> bool:
    """True iff ``B = c A`` for some nonzero scalar ``c``."""
    if A.n != B.n or A.field != B.field:
        return False
    if A.is_zero() or B.is_zero():
        return False
    return A.normalized() == B.normalized()


def batch_images(form: PreserverForm, X: np.ndarray, F: np.ndarray, p: int) -> np.ndarray:
    """Matrices of ``form`` applied to every idempotent ``X[k] ⊗ F[k]`` over GF(p).

    Vectorized counterpart of :func:`apply_form` used by large exhaustive checks;
    returns an ``(N, n, n)`` array of residues.
    """
    A = np.array(form.A.rows, dtype=np.int64)
    A_inv = np.array(form.A_inv.rows, dtype=np.int64)
    if form.branch is Branch.TRANSPOSE:
        X, F = F, X
    xs = (X @ A.T) % p
    fs = (F @ A_inv) % p
    return (xs[:, :, None] * fs[:, None, :]) % p
