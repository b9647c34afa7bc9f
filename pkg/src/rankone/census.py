"""Exhaustive census of pairing-preserving self-maps of the rank-one idempotents.

For a tiny ``(n, q)`` every map ``phi`` with ``tr phi(P)phi(Q) = tr PQ`` on all
pairs is found by backtracking with forward checking over a precomputed
pairing table, then each map is run through the extension/decomposition
pipeline.  An independent forward oracle lists the maps induced by explicit
conjugations, for comparison.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from .algebra import Field, Matrix
from .decompose import Branch, PreserverForm, batch_images, decompose, recover_orthogonal
from .errors import BudgetExceeded, CharTwo, RankOneError, Singular
from .extension import FULL, SYMMETRIC, MODES, SymmetryMap, extend_map, verify_consistency
from .idempotents import (RankOneIdempotent, enumerate_idempotents,
                          enumerate_symmetric_idempotents, isotropic_directions, trace_pairing)


@dataclass(frozen=True)
class CensusTask:
    n: int
    q: int
    mode: str = FULL
    bijective_only: bool = False
    budget: int | None = None
    use_profiles: bool = True
    symmetry_reduce: bool = False

    def __post_init__(self):
        Field(self.q)
        if self.q == 2:
            raise CharTwo("census needs odd characteristic")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.symmetry_reduce and self.mode != FULL:
            raise ValueError("symmetry reduction relies on a transitive action; full mode only")

    @property
    def field(self) -> Field:
        return Field(self.q)

    def key(self) -> dict:
        return {"n": self.n, "q": self.q, "mode": self.mode, "bijective_only": self.bijective_only}


def group_order(n: int, q: int) -> int:
    """``|PGL_n(GF(q))| = prod_{k<n} (q^n - q^k) / (q - 1)``."""
    return math.prod(q ** n - q ** k for k in range(n)) // (q - 1)


@lru_cache(maxsize=None)
def census_domain(n: int, q: int, mode: str) -> tuple[RankOneIdempotent, ...]:
    F = Field(q)
    if mode == FULL:
        return tuple(enumerate_idempotents(n, F))
    return tuple(enumerate_symmetric_idempotents(n, F))


class _SearchContext:
    """Read-only tables shared by every branch of one search."""

    def __init__(self, task: CensusTask):
        self.task = task
        dom = census_domain(task.n, task.q, task.mode)
        self.N = N = len(dom)
        self.T = [[trace_pairing(P, Q) for Q in dom] for P in dom]
        # masks[c][v]: images d with tr(d_c d_d) = v
        self.masks = []
        for c in range(N):
            row = [0] * task.q
            for d in range(N):
                row[self.T[c][d]] |= 1 << d
            self.masks.append(row)
        full = (1 << N) - 1
        if task.use_profiles:
            # phi is injective (I_1 spans M_n and the trace form is nondegenerate),
            # hence a bijection of I_1, so it preserves each pairing-value multiset.
            profiles = [tuple(sorted(row)) for row in self.T]
            by_profile = {}
            for d, prof in enumerate(profiles):
                by_profile[prof] = by_profile.get(prof, 0) | (1 << d)
            self.initial = [by_profile[prof] for prof in profiles]
        else:
            self.initial = [full] * N


class _Cap(Exception):
    pass


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _search_root(ctx: _SearchContext, root: int, cap: int | None) -> tuple[list[tuple], int]:
    """All solutions with ``phi(d_0) = d_root``; raises :class:`_Cap` past ``cap`` nodes."""
    N, T, masks = ctx.N, ctx.T, ctx.masks
    bij = ctx.task.bijective_only
    found = []
    assign = []
    nodes = 0

    def place(k, c, cand):
        nonlocal nodes
        nodes += 1
        if cap is not None and nodes > cap:
            raise _Cap
        row = T[k]
        mrow = masks[c]
        new = cand[:]
        for m in range(k + 1, N):
            v = new[m] & mrow[row[m]]
            if bij:
                v &= ~(1 << c)
            if not v:
                return
            new[m] = v
        assign.append(c)
        if k + 1 == N:
            found.append(tuple(assign))
        else:
            for d in _bits(new[k + 1]):
                place(k + 1, d, new)
        assign.pop()

    place(0, root, list(ctx.initial))
    return found, nodes


_CONTEXTS: dict = {}


def _context(task: CensusTask) -> _SearchContext:
    key = (task.n, task.q, task.mode, task.bijective_only, task.use_profiles)
    if key not in _CONTEXTS:
        _CONTEXTS[key] = _SearchContext(task)
    return _CONTEXTS[key]


def _root_worker(args):
    task, root, cap = args
    try:
        found, nodes = _search_root(_context(task), root, cap)
        return root, found, nodes, True
    except _Cap:
        return root, [], cap, False


def enumerate_preserving_maps(task: CensusTask, jobs: int = 1, resume: dict | None = None) -> list[tuple]:
    """Every map (as a tuple of image indices into the census domain) preserving the pairing.

    The search is split by the image of the first domain element; roots are
    completed in canonical order, so results and budget behaviour do not depend
    on ``jobs``.  On exhausting ``task.budget`` raises :class:`BudgetExceeded`
    whose checkpoint can be passed back as ``resume``.
    """
    ctx = _context(task)
    roots = list(_bits(ctx.initial[0]))
    if task.symmetry_reduce:
        roots = [0]
    done = {}
    used = 0
    if resume:
        if resume.get("task") != task.key():
            raise ValueError("checkpoint belongs to a different task")
        done = {int(r): [tuple(m) for m in maps] for r, maps in resume["completed"].items()}
        used = int(resume.get("nodes", 0))
    todo = [r for r in roots if r not in done]

    def checkpoint():
        return {"task": task.key(), "nodes": used,
                "completed": {str(r): [list(m) for m in done[r]] for r in sorted(done)}}

    budget = task.budget
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_root_worker, [(task, r, budget) for r in todo]))
    else:
        results = None

    for idx, root in enumerate(todo):
        if results is not None:
            _, found, nodes, complete = results[idx]
        else:
            cap = None if budget is None else max(budget - used, 0)
            _, found, nodes, complete = _root_worker((task, root, cap))
        if not complete or (budget is not None and used + nodes > budget):
            raise BudgetExceeded(used, sum(len(v) for v in done.values()), checkpoint())
        used += nodes
        done[root] = found

    maps = [m for r in sorted(done) for m in done[r]]
    if task.symmetry_reduce:
        maps = _expand_by_group(task, maps)
    return sorted(set(maps))


def _codes(mats: np.ndarray, p: int) -> np.ndarray:
    k = mats.shape[-1] * mats.shape[-2]
    weights = p ** np.arange(k, dtype=np.int64)
    return mats.reshape(len(mats), k) @ weights


def _domain_arrays(domain) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    X = np.array([P.x for P in domain], dtype=np.int64)
    F = np.array([P.f for P in domain], dtype=np.int64)
    M = X[:, :, None] * F[:, None, :]
    return X, F, M


def _index_lookup(domain, p):
    _, _, M = _domain_arrays(domain)
    codes = _codes(M % p, p)
    order = np.argsort(codes)
    return codes[order], order


def _lookup(sorted_codes, order, codes) -> np.ndarray:
    pos = np.searchsorted(sorted_codes, codes)
    pos = np.minimum(pos, len(sorted_codes) - 1)
    if not np.all(sorted_codes[pos] == codes):
        raise ValueError("image outside the census domain")
    return order[pos]


def normalized_invertibles(n: int, q: int):
    """Nonsingular matrices with first nonzero entry 1: one per element of PGL_n(GF(q))."""
    F = Field(q)
    for entries in itertools.product(range(q), repeat=n * n):
        if next((v for v in entries if v != 0), None) != 1:
            continue
        A = Matrix(F, tuple(tuple(entries[i * n:(i + 1) * n]) for i in range(n)))
        try:
            A.inverse()
        except Singular:
            continue
        yield A


def _conjugation_perm(A: np.ndarray, A_inv: np.ndarray, M: np.ndarray, p: int, lookup) -> tuple:
    images = np.einsum("ab,kbc,cd->kad", A, M, A_inv) % p
    return tuple(int(i) for i in _lookup(*lookup, _codes(images, p)))


def _expand_by_group(task: CensusTask, maps: list[tuple]) -> list[tuple]:
    # post-composing a preserver with a conjugation gives a preserver, and
    # conjugations act transitively on I_1, so fixing phi(d_0) = d_0 loses nothing
    dom = census_domain(task.n, task.q, task.mode)
    p = task.q
    X, F, _ = _domain_arrays(dom)
    lookup = _index_lookup(dom, p)
    out = set()
    for A in normalized_invertibles(task.n, p):
        perm = _conjugation_table(PreserverForm(A), X, F, p, lookup)
        for m in maps:
            out.add(tuple(perm[i] for i in m))
    return sorted(out)


def _conjugation_table(form: PreserverForm, X, F, p, lookup) -> tuple:
    return tuple(int(i) for i in _lookup(*lookup, _codes(batch_images(form, X, F, p), p)))


def forward_oracle_maps(n: int, q: int, mode: str = FULL) -> set[tuple]:
    """Maps induced by explicit conjugations, computed directly from the matrices.

    Full mode: ``P -> A P A^-1`` and ``P -> A Pᵗ A^-1`` over ``A`` in PGL_n(q).
    Symmetric mode: ``P -> U P Uᵗ`` over all orthogonal ``U``.
    """
    dom = census_domain(n, q, mode)
    lookup = _index_lookup(dom, q)
    _, _, M = _domain_arrays(dom)
    out = set()
    if mode == FULL:
        Mt = np.transpose(M, (0, 2, 1))
        for A in normalized_invertibles(n, q):
            a = np.array(A.rows, dtype=np.int64)
            a_inv = np.array(A.inverse().rows, dtype=np.int64)
            out.add(_conjugation_perm(a, a_inv, M, q, lookup))
            out.add(_conjugation_perm(a, a_inv, Mt, q, lookup))
    else:
        for U in orthogonal_matrices(n, q):
            u = np.array(U.rows, dtype=np.int64)
            out.add(_conjugation_perm(u, u.T, M, q, lookup))
    return out


def orthogonal_matrices(n: int, q: int) -> list[Matrix]:
    F = Field(q)
    eye = Matrix.identity(F, n)
    out = []
    for entries in itertools.product(range(q), repeat=n * n):
        U = Matrix(F, tuple(tuple(entries[i * n:(i + 1) * n]) for i in range(n)))
        if U.T @ U == eye:
            out.append(U)
    return out


def similitude_oracle_maps(n: int, q: int) -> set[tuple]:
    """Symmetric-mode maps ``P -> A P A^-1`` for ``Aᵗ A = cI``, ``c != 0``.

    These preserve symmetric idempotents and traces but need not come from an
    orthogonal matrix when ``c`` is not a square.
    """
    dom = census_domain(n, q, SYMMETRIC)
    lookup = _index_lookup(dom, q)
    _, _, M = _domain_arrays(dom)
    out = set()
    for A in normalized_invertibles(n, q):
        G = A.T @ A
        c = G[0, 0]
        if c == 0 or G != Matrix.identity(A.field, n).scale(c):
            continue
        a = np.array(A.rows, dtype=np.int64)
        a_inv = np.array(A.inverse().rows, dtype=np.int64)
        out.add(_conjugation_perm(a, a_inv, M, q, lookup))
    return out


def pairing_preserved(domain, phi: tuple) -> bool:
    """Re-check a map on all ``|domain|^2`` pairs from scratch."""
    return all(trace_pairing(domain[phi[a]], domain[phi[b]]) == trace_pairing(domain[a], domain[b])
               for a in range(len(domain)) for b in range(len(domain)))


@dataclass
class Certificate:
    map_id: int
    injective: bool
    verified: bool
    branch: str | None = None
    matrix: dict | None = None
    consistent: bool | None = None
    error: str | None = None


@dataclass
class CensusReport:
    task: dict
    domain_size: int
    excluded_directions: int
    total_maps: int
    failures: int
    identity_count: int
    transpose_count: int
    orthogonal_count: int
    group_order: int
    checks: dict
    certificates: list = dc_field(default_factory=list)
    findings: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["map-id", "branch", "A", "verified", "injective"])
        for c in self.certificates:
            if c.matrix is not None:
                mat = "; ".join(" ".join(row) for row in c.matrix["entries"])
            else:
                mat = ""
            w.writerow([c.map_id, c.branch or f"failed:{c.error}", mat,
                        str(c.verified).lower(), str(c.injective).lower()])
        return buf.getvalue()


def _certify(map_id: int, phi: tuple, domain, n: int, field: Field, mode: str) -> Certificate:
    table = SymmetryMap(n, field, {P: domain[i] for P, i in zip(domain, phi)}, mode)
    injective = len(set(phi)) == len(phi)
    try:
        Phi = extend_map(table)
    except RankOneError as exc:
        return Certificate(map_id, injective, False, consistent=False,
                           error=f"{type(exc).__name__}: {exc}")
    consistent = not verify_consistency(Phi, table)
    try:
        if mode == FULL:
            form = decompose(Phi)
            branch, mat = form.branch.value, form.A
        else:
            form = recover_orthogonal(Phi)
            branch, mat = "orthogonal", form.U
    except RankOneError as exc:
        return Certificate(map_id, injective, False, consistent=consistent,
                           error=f"{type(exc).__name__}: {exc}")
    if not consistent:
        return Certificate(map_id, injective, False, branch, mat.to_json(), consistent,
                           error="linear extension disagrees with the map")
    return Certificate(map_id, injective, True, branch, mat.to_json(), consistent)


def classify_all(maps: list[tuple], task: CensusTask) -> CensusReport:
    """Run extension and decomposition on every census map and tally the outcome."""
    n, q, mode = task.n, task.q, task.mode
    F = Field(q)
    domain = census_domain(n, q, mode)
    certs = [_certify(i, phi, domain, n, F, mode) for i, phi in enumerate(maps)]
    branches = [c.branch for c in certs if c.verified]
    order = group_order(n, q)
    report = CensusReport(
        task=task.key(),
        domain_size=len(domain),
        excluded_directions=len(isotropic_directions(n, F)) if mode == SYMMETRIC else 0,
        total_maps=len(maps),
        failures=sum(not c.verified for c in certs),
        identity_count=branches.count(Branch.IDENTITY.value),
        transpose_count=branches.count(Branch.TRANSPOSE.value),
        orthogonal_count=branches.count("orthogonal"),
        group_order=order,
        checks={},
        certificates=certs,
    )
    report.checks["all_injective"] = all(c.injective for c in certs)
    if mode == FULL:
        report.checks["zero_failures"] = report.failures == 0
        report.checks["identity_count_is_group_order"] = report.identity_count == order
        # for n = 1 the two branches coincide and ties go to identity
        want_t = order if n > 1 else 0
        report.checks["transpose_count_is_group_order"] = report.transpose_count == want_t
    return report


def run_census(task: CensusTask, jobs: int = 1, resume: dict | None = None,
               with_oracle: bool = True) -> tuple[list[tuple], CensusReport]:
    """Search, classify and (optionally) compare against the forward oracle."""
    maps = enumerate_preserving_maps(task, jobs=jobs, resume=resume)
    report = classify_all(maps, task)
    if with_oracle:
        found = set(maps)
        if task.mode == FULL:
            oracle = forward_oracle_maps(task.n, task.q, FULL)
            report.checks["equals_forward_oracle"] = found == oracle
            report.findings["forward_oracle_maps"] = len(oracle)
        else:
            ortho = forward_oracle_maps(task.n, task.q, SYMMETRIC)
            simil = similitude_oracle_maps(task.n, task.q)
            report.findings.update({
                "orthogonal_oracle_maps": len(ortho),
                "similitude_oracle_maps": len(simil),
                "census_minus_orthogonal": len(found - ortho),
                "orthogonal_minus_census": len(ortho - found),
                "census_minus_similitude": len(found - simil),
            })
            report.checks["contains_orthogonal_oracle"] = ortho <= found
    return maps, report
