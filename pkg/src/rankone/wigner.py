"""Numeric reconstruction of unitary/antiunitary symmetries of pure states.

A symmetry is given as an oracle on :class:`PureState`.  Its action on the
basis states, the real superpositions ``(e_1 + e_j)/√2`` and the imaginary
superpositions ``(e_1 + i e_j)/√2`` pins down ``U`` up to a global phase and
decides whether it acts linearly or conjugate-linearly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AmbiguousPhase, DimensionMismatch, NotASymmetry

DEFAULT_TOL = 1e-9


def _canonical_phase(v: np.ndarray, tol: float) -> np.ndarray:
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size == 0:
        return v
    lead = v[idx[0]]
    return v * (abs(lead) / lead)


class PureState:
    """A unit vector modulo global phase; the first component above ``tol`` is real positive."""

    __slots__ = ("v",)

    def __init__(self, v, tol: float = DEFAULT_TOL):
        v = np.asarray(v, dtype=complex).ravel()
        norm = np.linalg.norm(v)
        if norm <= tol:
            raise ValueError("zero vector is not a state")
        self.v = _canonical_phase(v / norm, tol)

    @property
    def n(self) -> int:
        return self.v.size

    def projector(self) -> np.ndarray:
        return np.outer(self.v, self.v.conj())

    def __repr__(self):
        return f"PureState({np.array2string(self.v, precision=4)})"


def basis_state(n: int, i: int) -> PureState:
    v = np.zeros(n, dtype=complex)
    v[i] = 1
    return PureState(v)


def transition_probability(P: PureState, Q: PureState) -> float:
    """``|<v_P, v_Q>|^2``, which equals ``tr PQ`` for the projectors."""
    if P.n != Q.n:
        raise DimensionMismatch(f"{P.n} vs {Q.n}")
    return float(abs(np.vdot(P.v, Q.v)) ** 2)


@dataclass
class UnitaryForm:
    U: np.ndarray
    antiunitary: bool
    residual: float = 0.0

    def apply(self, P: PureState) -> PureState:
        v = P.v.conj() if self.antiunitary else P.v
        return PureState(self.U @ v)

    def matrix_map(self, X: np.ndarray) -> np.ndarray:
        """The complex-linear extension: ``U X U*`` or ``U Xᵗ U*``.

        On projectors ``conj(P) = Pᵗ``, so the antiunitary action extends linearly
        through the transpose.
        """
        if self.antiunitary:
            X = X.T
        return self.U @ X @ self.U.conj().T

    def unit_images(self) -> np.ndarray:
        return unit_images(self.matrix_map, self.U.shape[0])

    def to_json(self) -> dict:
        return {"U": [[[float(z.real), float(z.imag)] for z in row] for row in self.U],
                "antiunitary": bool(self.antiunitary)}

    @classmethod
    def from_json(cls, data: dict) -> UnitaryForm:
        U = np.array([[complex(re, im) for re, im in row] for row in data["U"]])
        return cls(U, bool(data["antiunitary"]))


def probe_states(n: int) -> list[PureState]:
    probes = [basis_state(n, i) for i in range(n)]
    s = 1 / np.sqrt(2)
    for j in range(1, n):
        for phase in (1, 1j):
            v = np.zeros(n, dtype=complex)
            v[0], v[j] = s, s * phase
            probes.append(PureState(v))
    return probes


def _max_entry(M: np.ndarray) -> float:
    return float(np.max(np.abs(M))) if M.size else 0.0


def reconstruct_symmetry(phi: Callable[[PureState], PureState], n: int,
                         tol: float = DEFAULT_TOL) -> UnitaryForm:
    """Recover ``U`` (and the antiunitary flag) with ``phi(P) = U P U*``.

    Raises :class:`NotASymmetry` if the probe images are inconsistent with any
    unitary or antiunitary map, :class:`AmbiguousPhase` if an imaginary probe
    fits neither branch or the branches disagree between columns.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = 1 / np.sqrt(2)
    cols = [phi(basis_state(n, i)).v.copy() for i in range(n)]
    U = np.column_stack(cols)
    if _max_entry(U.conj().T @ U - np.eye(n)) > np.sqrt(tol):
        raise NotASymmetry("images of the basis states are not orthonormal")

    flags = []
    for j in range(1, n):
        v = np.zeros(n, dtype=complex)
        v[0], v[j] = s, s
        w = phi(PureState(v)).v
        a, b = np.vdot(cols[0], w), np.vdot(cols[j], w)
        if abs(abs(a) - s) > np.sqrt(tol) or abs(abs(b) - s) > np.sqrt(tol):
            raise NotASymmetry(f"real probe (1, {j + 1}) is not an equal superposition")
        z = b / a
        cols[j] = cols[j] * (z / abs(z))

        v[j] = 1j * s
        w = phi(PureState(v)).v
        a, b = np.vdot(cols[0], w), np.vdot(cols[j], w)
        if abs(a) <= np.sqrt(tol):
            raise NotASymmetry(f"imaginary probe (1, {j + 1}) is orthogonal to the first column")
        z = b / a
        if abs(z - 1j) <= np.sqrt(tol):
            flags.append(False)
        elif abs(z + 1j) <= np.sqrt(tol):
            flags.append(True)
        else:
            raise AmbiguousPhase(f"imaginary probe (1, {j + 1}) gives relative phase {z:.6g}")
    if len(set(flags)) > 1:
        raise AmbiguousPhase("columns disagree on unitary vs antiunitary")

    form = UnitaryForm(np.column_stack(cols), bool(flags and flags[0]))
    form.residual = max(_max_entry(phi(P).projector() - form.matrix_map(P.projector()))
                        for P in probe_states(n))
    if form.residual > tol:
        raise NotASymmetry(f"probe residual {form.residual:.3e} exceeds tol {tol:.1e}")
    return form


def unit_images(linear_map: Callable[[np.ndarray], np.ndarray], n: int) -> np.ndarray:
    """``images[i, j] = Phi(E_ij)`` as an ``(n, n, n, n)`` array."""
    images = np.zeros((n, n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = 1
            images[i, j] = linear_map(E)
    return images


def apply_images(images: np.ndarray, X: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ijkl->kl", X, images)


def _random_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


@dataclass
class JordanReport:
    square_residual: float
    adjoint_residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.square_residual <= self.tol and self.adjoint_residual <= self.tol


def verify_jordan(images: np.ndarray, samples: int = 100, tol: float = DEFAULT_TOL,
                  rng: np.random.Generator | None = None) -> JordanReport:
    """Max residuals of ``Phi(X²) = Phi(X)²`` and ``Phi(X*) = Phi(X)*`` on random ``X``."""
    rng = np.random.default_rng(0) if rng is None else rng
    n = images.shape[0]
    sq = adj = 0.0
    for _ in range(samples):
        X = _random_matrix(rng, n)
        Y = apply_images(images, X)
        sq = max(sq, _max_entry(apply_images(images, X @ X) - Y @ Y))
        adj = max(adj, _max_entry(apply_images(images, X.conj().T) - Y.conj().T))
    return JordanReport(sq, adj, tol)


class Morphism(enum.Enum):
    AUTOMORPHISM = "automorphism"
    ANTIAUTOMORPHISM = "antiautomorphism"
    NEITHER = "neither"


def classify_morphism(images: np.ndarray, samples: int = 100, tol: float = DEFAULT_TOL,
                      rng: np.random.Generator | None = None) -> Morphism:
    """Compare ``Phi(AB)`` against ``Phi(A)Phi(B)`` and ``Phi(B)Phi(A)``."""
    rng = np.random.default_rng(0) if rng is None else rng
    n = images.shape[0]
    auto = anti = 0.0
    for _ in range(samples):
        A, B = _random_matrix(rng, n), _random_matrix(rng, n)
        PA, PB = apply_images(images, A), apply_images(images, B)
        PAB = apply_images(images, A @ B)
        auto = max(auto, _max_entry(PAB - PA @ PB))
        anti = max(anti, _max_entry(PAB - PB @ PA))
    if auto <= tol:
        return Morphism.AUTOMORPHISM
    if anti <= tol:
        return Morphism.ANTIAUTOMORPHISM
    return Morphism.NEITHER


def orthogonality_equivalence(P: PureState, Q: PureState, tol: float = DEFAULT_TOL) -> tuple[bool, bool]:
    """``(tr PQ ≈ 0, PQ ≈ 0 and QP ≈ 0)``; the two always agree for pure states."""
    MP, MQ = P.projector(), Q.projector()
    by_trace = abs(np.trace(MP @ MQ)) <= tol
    by_product = _max_entry(MP @ MQ) <= tol and _max_entry(MQ @ MP) <= tol
    return bool(by_trace), bool(by_product)


def unit_image_rank(images: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """Numerical rank of the stacked unit images; ``n²`` means the extension is injective."""
    n = images.shape[0]
    return int(np.linalg.matrix_rank(images.reshape(n * n, n * n), tol=tol))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix."""
    Q, R = np.linalg.qr(_random_matrix(rng, n))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_state(n: int, rng: np.random.Generator) -> PureState:
    return PureState(rng.standard_normal(n) + 1j * rng.standard_normal(n))


def unitary_oracle(V: np.ndarray, antiunitary: bool = False) -> Callable[[PureState], PureState]:
    if antiunitary:
        return lambda P: PureState(V @ P.v.conj())
    return lambda P: PureState(V @ P.v)
