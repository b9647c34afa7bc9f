"""Command-line interface: ``rankone enumerate | reconstruct | census | wigner-demo``.

Exact-arithmetic randomness uses :class:`random.Random` (Mersenne Twister);
numeric randomness uses ``numpy.random.default_rng`` (PCG64).  Both are seeded
only from ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from .algebra import Field
from .census import CensusTask, run_census
from .decompose import decompose, recover_orthogonal
from .errors import BudgetExceeded, DomainGap, InfiniteField, NotAPreserver, RankOneError
from .extension import FULL, SYMMETRIC, SymmetryMap, check_trace_preservation, extend_map, verify_consistency
from .idempotents import enumerate_idempotents, enumerate_symmetric_idempotents, isotropic_directions
from .wigner import DEFAULT_TOL, NotASymmetry, random_unitary, reconstruct_symmetry, unitary_oracle

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_NOT_PRESERVER = 2
EXIT_DOMAIN_GAP = 3
EXIT_PARSE = 4
EXIT_BUDGET = 5


def atomic_write(path: str, text: str) -> None:
    """Write via a temp file in the same directory and rename on success."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _field_from_args(args) -> Field:
    if args.field is not None:
        return Field.parse(args.field)
    if args.q is None:
        raise ValueError("one of --q or --field is required")
    return Field(args.q)


def cmd_enumerate(args) -> int:
    try:
        field = _field_from_args(args)
        if args.symmetric or args.mode == SYMMETRIC:
            items = enumerate_symmetric_idempotents(args.n, field)
            excluded = len(isotropic_directions(args.n, field))
        else:
            items = enumerate_idempotents(args.n, field)
            excluded = None
    except (ValueError, InfiniteField) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    payload = _dumps([P.to_json() for P in items])
    if args.out:
        atomic_write(args.out, payload)
    else:
        sys.stdout.write(payload)
    line = f"count: {len(items)}"
    if excluded is not None:
        line += f" (isotropic directions excluded: {excluded})"
    print(line)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    try:
        with open(args.map_file) as fh:
            phi = SymmetryMap.from_json(json.load(fh))
    except (OSError, ValueError, KeyError, TypeError, RankOneError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    report = check_trace_preservation(phi)
    if not report.ok:
        print(f"NotAPreserver: {len(report.violations)} of {report.checked} pairs violate tr PQ")
        for P, Q, want, got in report.violations[:10]:
            enc = phi.field.encode
            print(f"  violating pair P={P!r} Q={Q!r}: tr PQ={enc(want)}, tr phi(P)phi(Q)={enc(got)}")
        return EXIT_NOT_PRESERVER
    try:
        Phi = extend_map(phi)
        form = decompose(Phi) if phi.mode == FULL else recover_orthogonal(Phi)
    except DomainGap as exc:
        print(f"DomainGap: {exc}")
        return EXIT_DOMAIN_GAP
    except NotAPreserver as exc:
        print(f"NotAPreserver: {type(exc).__name__}: {exc}")
        return EXIT_NOT_PRESERVER

    mismatches = verify_consistency(Phi, phi)
    if mismatches:
        print(f"NotAPreserver: extension disagrees on {len(mismatches)} domain entries")
        for P in mismatches[:10]:
            print(f"  violating probe {P!r}")
        return EXIT_NOT_PRESERVER

    out = form.to_json()
    out["verification"] = {"pairs_checked": report.checked, "domain_checked": len(phi.domain),
                           "mismatches": 0}
    payload = _dumps(out)
    if args.out:
        atomic_write(args.out, payload)
    else:
        sys.stdout.write(payload)
    label = getattr(form, "branch", None)
    label = label.value if label is not None else "orthogonal"
    print(f"verified: branch={label}, domain entries={len(phi.domain)}")
    return EXIT_OK


def cmd_census(args) -> int:
    mode = SYMMETRIC if args.symmetric else args.mode
    try:
        task = CensusTask(args.n, args.q, mode, args.bijective_only, args.budget,
                          symmetry_reduce=args.symmetry_reduce)
    except (ValueError, RankOneError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    resume = None
    if args.resume:
        with open(args.resume) as fh:
            resume = json.load(fh)
    try:
        maps, report = run_census(task, jobs=args.jobs, resume=resume)
    except BudgetExceeded as exc:
        path = (args.out or "census") + ".checkpoint.json"
        atomic_write(path, _dumps(exc.checkpoint))
        print(f"BudgetExceeded: {exc}; checkpoint written to {path}")
        return EXIT_BUDGET
    if args.out:
        atomic_write(args.out + ".json", _dumps(report.to_json()))
        atomic_write(args.out + ".csv", report.to_csv())
    print(f"census n={task.n} q={task.q} mode={task.mode} bijective_only={task.bijective_only}")
    print(f"domain size: {report.domain_size}")
    print(f"maps found: {report.total_maps}")
    print(f"decomposition failures: {report.failures}")
    if mode == FULL:
        print(f"identity branch: {report.identity_count}, transpose branch: {report.transpose_count}, "
              f"|PGL_{task.n}({task.q})| = {report.group_order}")
    else:
        print(f"orthogonal forms: {report.orthogonal_count}, isotropic directions excluded: "
              f"{report.excluded_directions}")
    for name, ok in sorted(report.checks.items()):
        print(f"check {name}: {'pass' if ok else 'FAIL'}")
    for name, value in sorted(report.findings.items()):
        print(f"finding {name}: {value}")
    if mode == FULL and not all(report.checks.values()):
        return EXIT_FAIL
    return EXIT_OK


def cmd_wigner_demo(args) -> int:
    if not 2 <= args.n <= 16:
        print(f"error: n must be in [2, 16], got {args.n}", file=sys.stderr)
        return EXIT_FAIL
    rng = np.random.default_rng(args.seed)
    V = random_unitary(args.n, rng)
    try:
        form = reconstruct_symmetry(unitary_oracle(V, args.antiunitary), args.n, args.tol)
    except NotASymmetry as exc:
        print(f"NotASymmetry: {exc}")
        return EXIT_FAIL
    ok = form.residual <= args.tol and form.antiunitary == args.antiunitary
    print(f"n={args.n} seed={args.seed}")
    print(f"antiunitary={str(form.antiunitary).lower()} (expected {str(args.antiunitary).lower()})")
    print(f"residual={form.residual:.3e} tol={args.tol:.1e}")
    print("ok" if ok else "MISMATCH")
    if args.out:
        atomic_write(args.out, _dumps(form.to_json()))
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rankone", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="list all rank-one idempotents over GF(q)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--field", help="rational | gf:<p>")
    p.add_argument("--mode", choices=[FULL, SYMMETRIC], default=FULL)
    p.add_argument("--symmetric", action="store_true", help="shorthand for --mode symmetric")
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("reconstruct", help="recover A / U from a map table")
    p.add_argument("map_file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("census", help="exhaustively find all pairing-preserving maps")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--mode", choices=[FULL, SYMMETRIC], default=FULL)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--bijective-only", action="store_true")
    p.add_argument("--symmetry-reduce", action="store_true",
                   help="search with phi(E_11) fixed, then close under conjugation")
    p.add_argument("--budget", type=int, help="search node cap")
    p.add_argument("--resume", help="checkpoint file from an earlier budget stop")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="path prefix for .json and .csv reports")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("wigner-demo", help="round-trip a random (anti)unitary symmetry")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--antiunitary", action="store_true")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--out")
    p.set_defaults(func=cmd_wigner_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
