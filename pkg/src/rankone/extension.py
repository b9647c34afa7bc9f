"""Linear extension of a map given only on rank-one idempotents.

A :class:`SymmetryMap` is known on (some of) the rank-one idempotents.  The
primed basis built from its values on the probe idempotents ``E_ii`` and
``E_ii + E_ij`` (or the symmetric probes ``(E_ii + E_jj + E_ij + E_ji)/2``)
defines a linear map on ``M_n`` (or ``S_n``), which is then checked against
every other value the map is known on.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Mapping, Sequence

from .algebra import Field, Matrix, row_rank
from .errors import CharTwo, DependentBasis, DimensionMismatch, DomainGap, NotIdempotent
from .idempotents import (RankOneIdempotent, symmetric_pair_idempotent, trace_pairing,
                          unit_idempotent)

FULL = "full"
SYMMETRIC = "symmetric"
MODES = (FULL, SYMMETRIC)


class SymmetryMap:
    """A map ``P -> phi(P)`` on rank-one idempotents.

    ``mapping`` is either a dict (a finite table) or a callable oracle.  Tables
    are validated on construction: every image is a rank-one idempotent of the
    right size, symmetric in symmetric mode.
    """

    def __init__(self, n: int, field: Field,
                 mapping: Mapping[RankOneIdempotent, RankOneIdempotent] | Callable,
                 mode: str = FULL):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.n = n
        self.field = field
        self.mode = mode
        if callable(mapping) and not isinstance(mapping, Mapping):
            self._oracle = mapping
            self._table = None
        else:
            self._oracle = None
            self._table = dict(mapping)
            for P, Q in self._table.items():
                self._validate(P)
                self._validate(Q)

    def _validate(self, P: RankOneIdempotent):
        if P.field != self.field or P.n != self.n:
            raise DimensionMismatch(f"{P!r} does not live in M_{self.n}({self.field!r})")
        if self.mode == SYMMETRIC and not P.is_symmetric():
            raise NotIdempotent(f"{P!r} is not symmetric")

    @property
    def is_table(self) -> bool:
        return self._table is not None

    @property
    def domain(self) -> list[RankOneIdempotent] | None:
        """Known domain in canonical order, or ``None`` for an oracle."""
        if self._table is None:
            return None
        return sorted(self._table, key=RankOneIdempotent.key)

    def __call__(self, P: RankOneIdempotent) -> RankOneIdempotent:
        if self._table is not None:
            try:
                return self._table[P]
            except KeyError:
                raise DomainGap(P) from None
        image = self._oracle(P)
        if image is None:
            raise DomainGap(P)
        return image

    def tabulate(self, domain: Iterable[RankOneIdempotent]) -> SymmetryMap:
        """Freeze the map into a table over ``domain``."""
        return SymmetryMap(self.n, self.field, {P: self(P) for P in domain}, self.mode)

    def items(self) -> list[tuple[RankOneIdempotent, RankOneIdempotent]]:
        return [(P, self(P)) for P in self.domain]

    def to_json(self) -> dict:
        if self._table is None:
            raise TypeError("only tabulated maps can be serialized")
        return {
            "mode": self.mode,
            "n": self.n,
            "field": self.field.to_json(),
            "pairs": [[P.to_json(), Q.to_json()] for P, Q in self.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> SymmetryMap:
        field = Field.from_json(data["field"])
        n = int(data["n"])
        table = {}
        for src, dst in data["pairs"]:
            P = RankOneIdempotent.from_json(src, field)
            table[P] = RankOneIdempotent.from_json(dst, field)
        return cls(n, field, table, data.get("mode", FULL))


def identity_map(n: int, field: Field, domain: Iterable[RankOneIdempotent], mode: str = FULL) -> SymmetryMap:
    return SymmetryMap(n, field, {P: P for P in domain}, mode)


def probe_set(n: int, field: Field, mode: str = FULL) -> list[RankOneIdempotent]:
    """The idempotents the primed-basis construction evaluates the map on."""
    if mode == FULL:
        probes = [unit_idempotent(field, n, i, j) for i in range(n) for j in range(n)]
    else:
        if field.char == 2:
            raise CharTwo("symmetric probes need 2 to be invertible")
        probes = [unit_idempotent(field, n, i) if i == j else symmetric_pair_idempotent(field, n, i, j)
                  for i in range(n) for j in range(i, n)]
    return probes


@dataclass
class PairingReport:
    checked: int
    violations: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_trace_preservation(phi: SymmetryMap,
                             pairs: Sequence[tuple[RankOneIdempotent, RankOneIdempotent]] | None = None
                             ) -> PairingReport:
    """Compare ``tr phi(P)phi(Q)`` with ``tr PQ``.

    Defaults to every ordered pair of the tabulated domain.  Violations are
    ``(P, Q, tr PQ, tr phi(P)phi(Q))`` tuples in canonical order.
    """
    if pairs is None:
        dom = phi.domain
        if dom is None:
            raise TypeError("an oracle map needs an explicit list of pairs")
        pairs = [(P, Q) for P in dom for Q in dom]
    report = PairingReport(checked=0)
    cache = {}
    for P, Q in pairs:
        for R in (P, Q):
            if R not in cache:
                cache[R] = phi(R)
        want = trace_pairing(P, Q)
        got = trace_pairing(cache[P], cache[Q])
        report.checked += 1
        if want != got:
            report.violations.append((P, Q, want, got))
    return report


def build_primed_basis(phi: SymmetryMap) -> dict[tuple[int, int], Matrix]:
    """``E'_ii = phi(E_ii)`` and ``E'_ij = phi(E_ii + E_ij) - phi(E_ii)``."""
    n, F = phi.n, phi.field
    diag = [phi(unit_idempotent(F, n, i)).matrix for i in range(n)]
    basis = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                basis[i, j] = diag[i]
            else:
                basis[i, j] = phi(unit_idempotent(F, n, i, j)).matrix - diag[i]
    return basis


def build_symmetric_primed_basis(phi: SymmetryMap) -> dict[tuple[int, int], Matrix]:
    """``E'_ii = phi(E_ii)`` and, for ``i < j``,
    ``E'_ij = 2 phi((E_ii + E_jj + E_ij + E_ji)/2) - phi(E_ii) - phi(E_jj)``.
    """
    n, F = phi.n, phi.field
    if F.char == 2:
        raise CharTwo("the symmetric primed basis divides by 2")
    diag = [phi(unit_idempotent(F, n, i)).matrix for i in range(n)]
    basis = {}
    for i in range(n):
        basis[i, i] = diag[i]
        for j in range(i + 1, n):
            S = phi(symmetric_pair_idempotent(F, n, i, j)).matrix
            basis[i, j] = S.scale(2) - diag[i] - diag[j]
    return basis


def check_independence(family: Mapping[tuple[int, int], Matrix]) -> tuple[bool, list[list]]:
    """Exact linear independence of the family plus its trace Gram matrix.

    ``gram[a][b] = tr(M_a M_b)`` with members in row-major index order.
    """
    keys = sorted(family)
    mats = [family[k] for k in keys]
    if not mats:
        return True, []
    F = mats[0].field
    independent = row_rank(F, [M.vec() for M in mats]) == len(mats)
    gram = [[(A @ B).trace() for B in mats] for A in mats]
    return independent, gram


@dataclass(frozen=True)
class LinearExtension:
    """A linear map on ``M_n`` (full mode) or ``S_n`` (symmetric mode).

    Full mode stores ``Phi(E_ij)`` for all ``(i, j)``.  Symmetric mode stores
    ``Phi(E_ii)`` under ``(i, i)`` and ``Phi(E_ij + E_ji)`` under ``(i, j)``,
    ``i < j``.
    """

    n: int
    field: Field
    images: dict
    mode: str = FULL

    def basis_order(self) -> list[tuple[int, int]]:
        if self.mode == FULL:
            return [(i, j) for i in range(self.n) for j in range(self.n)]
        return [(i, j) for i in range(self.n) for j in range(i, self.n)]

    def __call__(self, X: Matrix) -> Matrix:
        if X.n != self.n:
            raise DimensionMismatch(f"expected {self.n}x{self.n}, got {X.n}x{X.n}")
        if self.mode == SYMMETRIC and not X.is_symmetric():
            raise ValueError("symmetric-mode extension is only defined on symmetric matrices")
        out = Matrix.zeros(self.field, self.n)
        for i, j in self.basis_order():
            c = X[i, j]
            if c != 0:
                out = out + self.images[i, j].scale(c)
        return out

    def transposed(self) -> LinearExtension:
        """The map ``X -> Phi(Xᵗ)``."""
        if self.mode != FULL:
            raise ValueError("transposition is only meaningful in full mode")
        return LinearExtension(self.n, self.field,
                               {(i, j): self.images[j, i] for i, j in self.images}, FULL)

    def to_json(self) -> list:
        return [self.images[k].to_json() for k in self.basis_order()]


def extend_map(phi: SymmetryMap, check: bool = True) -> LinearExtension:
    """Build ``Phi`` from the primed basis of ``phi``.

    With ``check`` on, a dependent primed basis raises :class:`DependentBasis`:
    no trace-preserving map can produce one.
    """
    if phi.mode == FULL:
        basis = build_primed_basis(phi)
    else:
        basis = build_symmetric_primed_basis(phi)
    if check:
        independent, _ = check_independence(basis)
        if not independent:
            raise DependentBasis("primed basis is linearly dependent")
    return LinearExtension(phi.n, phi.field, basis, phi.mode)


def verify_consistency(Phi: LinearExtension, phi: SymmetryMap,
                       probes: Iterable[RankOneIdempotent] | None = None) -> list[RankOneIdempotent]:
    """Idempotents ``P`` with ``Phi(P) != phi(P)``; empty means consistent everywhere checked."""
    if probes is None:
        probes = phi.domain
        if probes is None:
            raise TypeError("an oracle map needs an explicit probe list")
    return [P for P in probes if Phi(P.matrix) != phi(P).matrix]
