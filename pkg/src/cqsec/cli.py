"""Command-line front end.

Subcommands: ``compute-d`` (criterion with joint cross-check), ``attack``
(whole-key / subset / known-plaintext), ``bounds`` (scalar bound table),
``reproduce`` (the four headline case-study numbers), and
``counterexample`` (locking and biased-distribution galleries). Output is
a deterministic row table in text, JSON, or CSV.

Exit codes: 0 success, 2 usage or validation error, 3 solver failed to
certify (partial results are still printed).
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import os
import sys

from .attacks import AttackSpec, compare_to_bounds, kpa_average_success, run_attack
from .bounds import (
    binary_entropy,
    entropy_lower_bound,
    fano_ber_deviation,
    markov_failure_budget,
    sequence_error_bound,
    variational_distance,
)
from .ensemble import (
    build_biased_classical,
    build_biased_ensemble,
    build_ideal_ensemble,
    build_locking_example,
    build_random_ensemble,
    compute_d,
    compute_d_joint,
)
from .io import dumps, load_ensemble
from .tolerances import MAX_DIM, SOLVER_MAX_ITER, SOLVER_TOL

TOL_NAMES = ("solver", "solver-max-iter")
ENV_TOL = "CQSEC_TOL"


def _parse_tol_overrides(pairs, env_value) -> dict:
    """Merge tolerance overrides from the environment and --tol flags."""
    merged: dict[str, float] = {}
    sources = []
    if env_value:
        sources.extend(part for part in env_value.split(",") if part.strip())
    sources.extend(pairs or [])
    for item in sources:
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in TOL_NAMES:
            raise ValueError(
                f"unknown tolerance override {item!r}; expected name=value with "
                f"name in {TOL_NAMES}"
            )
        merged[name] = float(value)
    return merged


def _solver_params(overrides: dict) -> tuple[float, int]:
    tol = overrides.get("solver", SOLVER_TOL)
    max_iter = int(overrides.get("solver-max-iter", SOLVER_MAX_ITER))
    return tol, max_iter


def _load_target_ensemble(args):
    if args.input:
        return load_ensemble(args.input)
    if args.builtin == "locking":
        return build_locking_example()
    if args.builtin == "ideal":
        return build_ideal_ensemble(args.n_bits, args.dim)
    if args.builtin == "biased":
        return build_biased_ensemble(args.n_bits, args.eps)
    return build_random_ensemble(args.n_bits, args.dim, args.seed, pure=not args.mixed)


def _parse_positions(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part != "")
    except ValueError:
        raise ValueError(f"{flag} must be a comma-separated list of integers, got {text!r}")


def _fmt_value(value, sig: bool) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}" if sig else repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt_value(v, sig) for v in value) + "]"
    return str(value)


def _render(command: str, rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return dumps({"command": command, "rows": rows}) + "\n"
    if fmt == "csv":
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "value", "formula", "note"])
        for row in rows:
            value = row.get("value")
            if isinstance(value, (list, tuple)):
                value = ";".join(_fmt_value(v, False) for v in value)
            else:
                value = _fmt_value(value, False)
            writer.writerow([row["name"], value, row.get("formula", ""), row.get("note", "")])
        return buf.getvalue()
    width = max(len(row["name"]) for row in rows)
    lines = [f"# {command}"]
    for row in rows:
        line = f"{row['name']:<{width}}  {_fmt_value(row.get('value'), True)}"
        note = row.get("note")
        if note:
            line += f"  ({note})"
        lines.append(line)
    return "\n".join(lines) + "\n"


def _attack_rows(result) -> list[dict]:
    rows = [
        {"name": "success-prob", "value": result.success_prob},
        {"name": "ber", "value": result.ber},
        {"name": "per-bit-error", "value": list(result.per_bit_error)},
        {"name": "method", "value": result.method},
    ]
    if result.certificate_residual is not None:
        rows.append({"name": "certificate-residual", "value": result.certificate_residual})
        rows.append({"name": "converged", "value": bool(result.converged)})
    return rows


def _cmd_compute_d(args, overrides) -> tuple[list[dict], int]:
    ens = _load_target_ensemble(args)
    d = compute_d(ens)
    rows = [{"name": "criterion-d", "value": d, "formula": "criterion-d"}]
    if ens.num_keys * ens.dim <= MAX_DIM:
        d_joint = compute_d_joint(ens)
        rows.append({"name": "criterion-d-joint", "value": d_joint,
                     "formula": "joint-criterion-d"})
        rows.append({"name": "cross-check-difference", "value": abs(d - d_joint)})
    else:
        rows.append({"name": "criterion-d-joint", "value": None,
                     "note": f"joint dimension {ens.num_keys * ens.dim} exceeds {MAX_DIM}"})
    return rows, 0


def _cmd_attack(args, overrides) -> tuple[list[dict], int]:
    ens = _load_target_ensemble(args)
    tol, max_iter = _solver_params(overrides)
    positions = _parse_positions(args.positions, "--positions") if args.positions else ()
    known = _parse_positions(args.known, "--known") if args.known else ()
    if args.target in ("subset", "kpa") and not positions:
        raise ValueError(f"--target {args.target} requires --positions")
    if args.target == "kpa" and (not known or args.values is None):
        raise ValueError("--target kpa requires --known and --values")
    spec = AttackSpec(
        target={"whole": "whole", "subset": "subset", "kpa": "kpa"}[args.target],
        method=args.method,
        positions=positions,
        known_positions=known,
        known_values=args.values or "",
    )
    result = run_attack(ens, spec, tol=tol, max_iter=max_iter)
    rows = _attack_rows(result)
    if args.target == "kpa":
        avg = kpa_average_success(ens, known, positions, method=args.method,
                                  tol=tol, max_iter=max_iter)
        rows.append({"name": "kpa-average-success", "value": avg,
                     "note": "success weighted over all known-bit values"})
    code = 3 if result.converged is False else 0
    return rows, code


def _cmd_bounds(args, overrides) -> tuple[list[dict], int]:
    eps = args.eps
    if eps < 0.0 or eps >= 1.0:
        raise ValueError(f"--eps must be in [0, 1), got {eps!r}")
    num_keys = float(1 << args.n_bits) if args.n_bits else math.inf
    rows: list[dict] = []
    if eps == 0.0:
        rows.append({"name": "markov-individual-level", "value": 0.0,
                     "formula": "markov-budget", "note": "ideal: nothing to convert"})
        rows.append({"name": "markov-total-failure", "value": 0.0,
                     "formula": "markov-budget"})
        rows.append({"name": "whole-key-success-bound", "value": 1.0 / num_keys,
                     "formula": "sequence-error-bound"})
        rows.append({"name": "ber-deviation-bound", "value": 0.0,
                     "formula": "ber-deviation-bound"})
    else:
        budget = markov_failure_budget(eps, args.uses)
        rows.append({"name": "markov-individual-level", "value": budget.sigmas[0],
                     "formula": "markov-budget",
                     "note": f"{args.uses} use(s) of the averaged guarantee"})
        rows.append({"name": "markov-total-failure", "value": budget.total_failure,
                     "formula": "markov-budget"})
        seq = sequence_error_bound(num_keys, eps)
        rows.append(seq.to_dict())
        dev = fano_ber_deviation(eps)
        rows.append(dev.to_dict())
    if args.entropy_n:
        if eps > 0.5:
            rows.append({"name": "key-entropy-floor", "value": None,
                         "formula": "entropy-continuity",
                         "note": f"rejected: valid only for eps <= 1/2, got {eps}"})
        else:
            rows.append({"name": "key-entropy-floor",
                         "value": entropy_lower_bound(args.entropy_n, eps),
                         "formula": "entropy-continuity"})
    return rows, 0


def _cmd_reproduce(args, overrides) -> tuple[list[dict], int]:
    budget = markov_failure_budget(2.0 ** -21, uses=2)
    seq = sequence_error_bound(math.inf, 1e-9)
    dev = fano_ber_deviation(1e-9)
    rows = [
        {"name": "individual-level-from-2^-21", "value": budget.sigmas[0],
         "formula": "markov-budget",
         "note": "averaged 2^-21 becomes an individual level of exactly 2^-7"},
        {"name": "whole-key-success-bound-at-1e-9", "value": seq.value,
         "formula": "sequence-error-bound",
         "note": "order-of-magnitude value 1e-3"},
        {"name": "ber-deviation-bound-at-1e-9", "value": dev.value,
         "formula": "ber-deviation-bound",
         "note": f"log2 = {math.log2(dev.value):.2f}, about 2^-9"},
        {"name": "key-bits-per-extra-correct-bit", "value": 1.0 / dev.value,
         "formula": "ber-deviation-bound",
         "note": "about one extra correct bit per ~430 key bits (order 500)"},
    ]
    return rows, 0


def _cmd_counterexample(args, overrides) -> tuple[list[dict], int]:
    tol, max_iter = _solver_params(overrides)
    if args.name == "locking":
        ens = build_locking_example()
        d = compute_d(ens)
        whole = run_attack(ens, AttackSpec(target="whole", method="iterative"),
                           tol=tol, max_iter=max_iter)
        kpa = kpa_average_success(ens, (0,), (1,), method="iterative",
                                  tol=tol, max_iter=max_iter)
        rows = [
            {"name": "criterion-d", "value": d},
            {"name": "whole-key-success", "value": whole.success_prob,
             "note": f"certificate residual {whole.certificate_residual:.2e}"},
            {"name": "kpa-success", "value": kpa,
             "note": "second bit recovered given the first"},
            {"name": "verdict",
             "value": "criterion d = 0.5 < 1, yet one known bit reveals the "
                      "other with certainty: the key fails under known plaintext"},
        ]
        code = 3 if whole.converged is False else 0
        return rows, code
    probs = build_biased_classical(args.n_bits, args.eps)
    n = probs.size
    uniform = [1.0 / n] * n
    gain_fraction = float((probs > 1.0 / n).sum()) / n
    rows = [
        {"name": "v-unhalved", "value": variational_distance(probs, uniform, halved=False)},
        {"name": "v-halved", "value": variational_distance(probs, uniform, halved=True)},
        {"name": "gain-fraction", "value": gain_fraction,
         "note": "fraction of outcomes strictly above uniform"},
        {"name": "map-advantage", "value": float(probs.max()),
         "note": "best single-guess success; uniform baseline is 1/N"},
    ]
    return rows, 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqsec",
        description="Security diagnostics for classical-quantum key ensembles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        p.add_argument("--output", help="write the report to a file instead of stdout")
        p.add_argument("--tol", action="append", metavar="NAME=VALUE",
                       help=f"tolerance override, names: {', '.join(TOL_NAMES)}")

    def add_source(p):
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--input", help="ensemble JSON file")
        group.add_argument("--builtin", choices=("locking", "ideal", "biased", "random"))
        p.add_argument("--n-bits", type=int, default=2)
        p.add_argument("--dim", type=int, default=2)
        p.add_argument("--eps", type=float, default=0.1,
                       help="bias for the biased builtin")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--mixed", action="store_true",
                       help="random builtin: draw mixed states instead of pure")

    p = sub.add_parser("compute-d", help="criterion value with joint cross-check")
    add_source(p)
    add_common(p)

    p = sub.add_parser("attack", help="run an eavesdropper attack")
    add_source(p)
    p.add_argument("--target", choices=("whole", "subset", "kpa"), default="whole")
    p.add_argument("--positions", help="comma-separated target bit positions")
    p.add_argument("--known", help="comma-separated known bit positions (kpa)")
    p.add_argument("--values", help="bit values at the known positions (kpa)")
    p.add_argument("--method", choices=("map", "pgm", "iterative", "per-bit"),
                   default="iterative")
    add_common(p)

    p = sub.add_parser("bounds", help="scalar bound table for a guarantee level")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--uses", type=int, choices=(1, 2, 3), default=2)
    p.add_argument("--n-bits", type=int, help="key length for the 1/N term")
    p.add_argument("--entropy-n", type=int, help="key length for the entropy floor row")
    add_common(p)

    p = sub.add_parser("reproduce", help="regenerate the headline case-study numbers")
    add_common(p)

    p = sub.add_parser("counterexample", help="counter-example galleries")
    p.add_argument("name", choices=("locking", "biased"))
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--n-bits", type=int, default=2)
    add_common(p)
    return parser


COMMANDS = {
    "compute-d": _cmd_compute_d,
    "attack": _cmd_attack,
    "bounds": _cmd_bounds,
    "reproduce": _cmd_reproduce,
    "counterexample": _cmd_counterexample,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = _parse_tol_overrides(args.tol, os.environ.get(ENV_TOL))
        rows, code = COMMANDS[args.command](args, overrides)
    except json.JSONDecodeError as exc:
        print(f"error: cannot parse JSON input: {exc.msg} at line {exc.lineno} "
              f"column {exc.colno}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = _render(args.command, rows, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
