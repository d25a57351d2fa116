"""Command line front end: JSON in, JSON report out, exit codes 0/1/2.

Exit code 0 means the command ran and the checked property holds (status
``ok``), 1 means it ran and the property fails (``violation``), 2 means
the inputs were unusable (``error``). The environment variable
``ISOPOSET_SEED`` overrides ``--seed`` when present.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import finite_rank, interpolation, matrixio, pisom, randomgen, twonest
from .errors import (
    HypothesisViolated,
    Infeasible,
    IsoposetError,
    NotAPartialIsometry,
    PreconditionViolated,
    UnknownCommand,
)
from .linalg import Tolerances, spectral_norm
from .matrixio import (
    Report,
    STATUS_ERROR,
    STATUS_OK,
    STATUS_VIOLATION,
    encode_matrix,
    encode_vector,
    parse_inline_vector,
    parse_matrix_file,
    write_matrix_file,
)

COMMANDS = (
    "validate", "order", "inf", "sup", "cover", "algebra", "member",
    "counterexample", "decompose", "solve", "solve-adjoint", "hw", "random",
)


def _finite_or_str(value: float):
    return value if math.isfinite(value) else "inf"


def _load_chain(path, tol):
    doc = parse_matrix_file(path)
    members = [pisom.validate_partial_isometry(m, tol) for m in doc.matrices]
    return twonest.build_chain(members, tol, dim=doc.dim)


def _load_operator(path, name, tol):
    doc = parse_matrix_file(path)
    if name is not None:
        return doc.named(name)
    if not doc.entries:
        raise matrixio.ParseError(f"{path}: file holds no matrices")
    return doc.entries[0].matrix


def _cmd_validate(args, tol, seed):
    doc = parse_matrix_file(args.matrices)
    results = []
    all_ok = True
    for entry in doc.entries:
        try:
            v = pisom.validate_partial_isometry(entry.matrix, tol)
            results.append({
                "name": entry.name,
                "is_partial_isometry": True,
                "rank": v.rank,
                "residuals": pisom.partial_isometry_residuals(entry.matrix, tol),
            })
        except NotAPartialIsometry as exc:
            all_ok = False
            results.append({
                "name": entry.name,
                "is_partial_isometry": False,
                "reason": str(exc),
            })
    status = STATUS_OK if all_ok else STATUS_VIOLATION
    return status, {"dim": doc.dim, "results": results}


def _cmd_order(args, tol, seed):
    doc = parse_matrix_file(args.matrices)
    left = pisom.validate_partial_isometry(doc.named(args.left), tol)
    right = pisom.validate_partial_isometry(doc.named(args.right), tol)
    leq = pisom.hm_leq(left, right, tol)
    geq = pisom.hm_leq(right, left, tol)
    payload = {
        "left": args.left,
        "right": args.right,
        "leq": leq,
        "geq": geq,
        "comparable": leq or geq,
    }
    return (STATUS_OK if leq else STATUS_VIOLATION), payload


def _cmd_inf(args, tol, seed):
    doc = parse_matrix_file(args.matrices)
    family = [pisom.validate_partial_isometry(m, tol) for m in doc.matrices]
    result = pisom.infimum(family, tol)
    return STATUS_OK, {"matrix": encode_matrix(result.v), "rank": result.rank}


def _cmd_sup(args, tol, seed):
    doc = parse_matrix_file(args.matrices)
    bound = None
    family = []
    for entry in doc.entries:
        element = pisom.validate_partial_isometry(entry.matrix, tol)
        if args.upper_bound is not None and entry.name == args.upper_bound:
            bound = element
        else:
            family.append(element)
    if args.upper_bound is not None and bound is None:
        raise matrixio.ParseError(f"no matrix named {args.upper_bound!r} in file")
    result = pisom.supremum(family, upper_bound=bound, tol=tol)
    return STATUS_OK, {"matrix": encode_matrix(result.v), "rank": result.rank}


def _cmd_cover(args, tol, seed):
    doc = parse_matrix_file(args.matrices)
    family = [pisom.validate_partial_isometry(m, tol) for m in doc.matrices]
    cover = pisom.complete_cover(family, tol, dim=doc.dim)
    return STATUS_OK, {
        "count": len(cover),
        "elements": [encode_matrix(e.v) for e in cover],
    }


def _cmd_algebra(args, tol, seed):
    chain = _load_chain(args.chain, tol)
    report = twonest.algebra_criterion(chain, tol)
    status = STATUS_OK if report.is_algebra else STATUS_VIOLATION
    return status, {
        "chain_length": len(chain.elements),
        "is_algebra": report.is_algebra,
        "is_nest_algebra": report.is_nest_algebra,
        "per_element_status": list(report.per_element_status),
        "ppi_status": list(report.ppi_status),
    }


def _cmd_member(args, tol, seed):
    chain = _load_chain(args.chain, tol)
    op = _load_operator(args.op, args.op_name, tol)
    report = twonest.membership(op, chain, tol)
    status = STATUS_OK if report.is_member else STATUS_VIOLATION
    return status, {
        "is_member": report.is_member,
        "residuals": list(report.residuals),
        "worst_element": report.worst_element,
    }


def _cmd_counterexample(args, tol, seed):
    chain = _load_chain(args.chain, tol)
    index = args.element
    if index is None:
        report = twonest.algebra_criterion(chain, tol)
        violating = [
            i for i, s in enumerate(report.per_element_status)
            if s == twonest.VIOLATION
        ]
        if not violating:
            raise PreconditionViolated("chain has no violating element")
        index = violating[0]
    witness = twonest.counterexample_xy(chain, index, tol)
    return STATUS_OK, {
        "element_index": index,
        "case": witness.case,
        "x": encode_vector(witness.x),
        "y": encode_vector(witness.y),
    }


def _cmd_decompose(args, tol, seed):
    chain = _load_chain(args.chain, tol)
    op = _load_operator(args.op, args.op_name, tol)
    result = finite_rank.decompose_finite_rank(op, chain, tol)
    return STATUS_OK, {
        "rank": len(result.terms),
        "residual": result.residual,
        "terms": [
            {"e": encode_vector(t.e), "f": encode_vector(t.f)}
            for t in result.terms
        ],
    }


def _solve_payload(solution):
    return {
        "K": _finite_or_str(solution.k),
        "certificate": solution.certificate,
        "achieved_norm": solution.achieved_norm,
        "iterations": solution.iterations,
        "converged": solution.converged,
        "T": encode_matrix(solution.operator),
    }


def _cmd_solve(args, tol, seed):
    chain = _load_chain(args.chain, tol)
    x = parse_inline_vector(args.x)
    y = parse_inline_vector(args.y)
    try:
        solution = interpolation.chain_interpolate(x, y, chain, tol)
    except Infeasible as exc:
        k, cert = interpolation.chain_bound(x, y, chain, tol)
        return STATUS_VIOLATION, {
            "solvable": False,
            "reason": str(exc),
            "K": _finite_or_str(k),
            "certificate": cert,
        }
    payload = _solve_payload(solution)
    payload["solvable"] = True
    payload["residual"] = float(np.linalg.norm(solution.operator @ x - y))
    return STATUS_OK, payload


def _cmd_solve_adjoint(args, tol, seed):
    chain = _load_chain(args.chain, tol)
    x = parse_inline_vector(args.x)
    y = parse_inline_vector(args.y)
    try:
        solution = interpolation.chain_interpolate_adjoint(x, y, chain, tol)
    except Infeasible as exc:
        k, cert = interpolation.adjoint_bound(x, y, chain, tol)
        return STATUS_VIOLATION, {
            "solvable": False,
            "reason": str(exc),
            "K": _finite_or_str(k),
            "certificate": cert,
        }
    payload = _solve_payload(solution)
    payload["solvable"] = True
    payload["residual"] = float(
        np.linalg.norm(solution.operator.conj().T @ x - y)
    )
    return STATUS_OK, payload


def _cmd_hw(args, tol, seed):
    doc = parse_matrix_file(args.matrices)
    m = _load_operator(args.matrices, args.name, tol)
    element = pisom.validate_partial_isometry(m, tol)
    report = pisom.hw_invariants(element, tol)
    status = STATUS_OK if report.is_ppi else STATUS_VIOLATION
    return status, {
        "dim": doc.dim,
        "is_ppi": report.is_ppi,
        "horizon": report.horizon,
        "dim_unitary": report.dim_unitary,
        "shift_multiplicities": {
            str(k): v for k, v in sorted(report.shift_multiplicities.items())
        },
        "rank_sequence": list(report.rank_sequence),
        "failure_power": report.failure_power,
    }


def _cmd_random(args, tol, seed):
    effective = 0 if seed is None else seed
    if args.kind == "pisom":
        rank = args.dim if args.rank is None else args.rank
        element = randomgen.random_partial_isometry(args.dim, rank, effective, tol)
        named = [("V", element.v)]
        summary = {"kind": "pisom", "dim": args.dim, "rank": element.rank}
    else:
        length = min(args.length, args.dim)
        chain = randomgen.random_chain(args.dim, length, args.mode, effective, tol)
        named = [
            (f"E{i}", e.v) for i, e in enumerate(chain.elements) if e.rank > 0
        ]
        summary = {
            "kind": "chain",
            "dim": args.dim,
            "mode": args.mode,
            "length": len(named),
        }
    if args.write:
        write_matrix_file(args.write, args.dim, named)
        summary["path"] = args.write
    else:
        summary["matrices"] = matrixio.matrix_document(args.dim, named)
    return STATUS_OK, summary


_HANDLERS = {
    "validate": _cmd_validate,
    "order": _cmd_order,
    "inf": _cmd_inf,
    "sup": _cmd_sup,
    "cover": _cmd_cover,
    "algebra": _cmd_algebra,
    "member": _cmd_member,
    "counterexample": _cmd_counterexample,
    "decompose": _cmd_decompose,
    "solve": _cmd_solve,
    "solve-adjoint": _cmd_solve_adjoint,
    "hw": _cmd_hw,
    "random": _cmd_random,
}


def run(command: str, args, tol: Tolerances, seed: int | None) -> Report:
    """Dispatch one command and wrap the outcome in a :class:`Report`."""
    handler = _HANDLERS.get(command)
    if handler is None:
        raise UnknownCommand(f"unknown command {command!r}")
    tolerances = {
        "tol_rank": tol.tol_rank,
        "tol_eq": tol.tol_eq,
        "tol_member": tol.tol_member,
    }
    try:
        status, payload = handler(args, tol, seed)
    except IsoposetError as exc:
        return Report(
            command=command,
            status=STATUS_ERROR,
            payload={"error": type(exc).__name__, "message": str(exc)},
            seed=seed,
            tolerances=tolerances,
        )
    return Report(
        command=command,
        status=status,
        payload=payload,
        seed=seed,
        tolerances=tolerances,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=1e-10,
                        help="relative singular-value cutoff")
    common.add_argument("--tol-eq", type=float, default=1e-9,
                        help="relative matrix-equality tolerance")
    common.add_argument("--tol-member", type=float, default=1e-8,
                        help="relative membership-residual tolerance")
    common.add_argument("--output", help="write the JSON report here")
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (ISOPOSET_SEED overrides)")

    parser = argparse.ArgumentParser(
        prog="isoposet",
        description="Partial-isometry chains, 2-nest operator spaces, and "
                    "minimal-norm interpolation on C^d.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common],
                       help="check matrices are partial isometries")
    p.add_argument("--matrices", required=True)

    p = sub.add_parser("order", parents=[common],
                       help="compare two partial isometries in the HM order")
    p.add_argument("--matrices", required=True)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)

    p = sub.add_parser("inf", parents=[common],
                       help="infimum of a family of partial isometries")
    p.add_argument("--matrices", required=True)

    p = sub.add_parser("sup", parents=[common],
                       help="supremum of a chain or bounded family")
    p.add_argument("--matrices", required=True)
    p.add_argument("--upper-bound", default=None,
                   help="name of the bounding matrix inside the file")

    p = sub.add_parser("cover", parents=[common],
                       help="complete cover of a totally ordered family")
    p.add_argument("--matrices", required=True)

    p = sub.add_parser("algebra", parents=[common],
                       help="algebra / left-ideal criterion for a chain")
    p.add_argument("--chain", required=True)

    p = sub.add_parser("member", parents=[common],
                       help="membership of an operator in the chain space")
    p.add_argument("--chain", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--op-name", default=None)

    p = sub.add_parser("counterexample", parents=[common],
                       help="rank-one witness at a violating chain element")
    p.add_argument("--chain", required=True)
    p.add_argument("--element", type=int, default=None)

    p = sub.add_parser("decompose", parents=[common],
                       help="split a finite-rank member into rank-one members")
    p.add_argument("--chain", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--op-name", default=None)

    for name in ("solve", "solve-adjoint"):
        p = sub.add_parser(
            name, parents=[common],
            help=f"minimal-norm {'T* x = y' if 'adjoint' in name else 'T x = y'}",
        )
        p.add_argument("--chain", required=True)
        p.add_argument("--x", required=True,
                       help="inline JSON array or path to one")
        p.add_argument("--y", required=True)

    p = sub.add_parser("hw", parents=[common],
                       help="power partial isometry invariants")
    p.add_argument("--matrices", required=True)
    p.add_argument("--name", default=None)

    p = sub.add_parser("random", parents=[common],
                       help="generate a seeded random fixture")
    p.add_argument("--kind", choices=("pisom", "chain"), required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--length", type=int, default=1)
    p.add_argument("--mode", choices=randomgen.CHAIN_MODES,
                   default=randomgen.MIXED)
    p.add_argument("--write", default=None,
                   help="write the generated matrix file here")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = Tolerances(args.tol_rank, args.tol_eq, args.tol_member)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    env_seed = os.environ.get("ISOPOSET_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            print(f"error: ISOPOSET_SEED={env_seed!r} is not an integer",
                  file=sys.stderr)
            return 2
    else:
        seed = args.seed
    report = run(args.command, args, tol, seed)
    text = report.to_json()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
