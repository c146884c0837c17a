"""Batch command-line front end.

Subcommands:
  law         exact law of a set at a time: JSON report, CDF CSV, CDF figure
  levy        certified Lévy-distance bracket between two measure files
  tower       height-n tower with junk bound gamma, as JSON
  construct   approximate | flatten | flatten-seq | targets, emitting a
              self-contained manifest (plus a CDF figure of the result)
  verify      re-check every claim of a manifest, exit 0 iff all hold

Outputs are deterministic: identical argv and config produce byte-identical
JSON/CSV artifacts. Exit status 2 flags usage errors, 1 verification
failures and capacity errors, 0 success.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from .construct import (
    approximate_on_disjoint,
    flatten_at,
    flatten_subsequence,
    realize_targets,
)
from .errors import ErgolabError
from .intervals import IntervalSet
from .laws import exact_law
from .manifest import (
    TOOL_VERSION,
    build_manifest,
    canonical_json,
    certificate_to_json,
    ledger_to_json,
    read_manifest,
    verify_manifest,
    write_manifest,
)
from .measures import DIRAC_ZERO, DiscreteMeasure, levy_distance
from .rationals import decimal_render, format_fraction, parse_fraction
from .sequences import make_sequence
from .systems import rokhlin_tower

DEFAULT_HORIZON = 1 << 26


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ErgolabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ergolab",
        description="exact Birkhoff-sum law laboratory on the dyadic odometer",
    )
    parser.add_argument("--version", action="version", version=TOOL_VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seq", choices=("sqrt", "pow34"), default="sqrt")
        p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
        p.add_argument("--out", type=Path, default=Path("."))
        p.add_argument("--no-figures", action="store_true")

    p_law = sub.add_parser("law", help="exact law of a set at time n")
    common(p_law)
    p_law.add_argument("--set", dest="set_file", type=Path, required=True)
    p_law.add_argument("--n", type=int, required=True)
    p_law.add_argument("--target", type=Path, help="optional overlay measure")
    p_law.add_argument("--cells", action="store_true", help="embed partition cells")
    p_law.set_defaults(handler=_cmd_law)

    p_levy = sub.add_parser("levy", help="certified Lévy bracket of two measures")
    common(p_levy)
    p_levy.add_argument("--a", dest="a_file", type=Path, required=True)
    p_levy.add_argument("--b", dest="b_file", type=Path, required=True)
    p_levy.add_argument("--tol", type=str, default="1/64")
    p_levy.set_defaults(handler=_cmd_levy)

    p_tower = sub.add_parser("tower", help="height-n tower with junk bound gamma")
    common(p_tower)
    p_tower.add_argument("--height", type=int, required=True)
    p_tower.add_argument("--gamma", type=str, required=True)
    p_tower.set_defaults(handler=_cmd_tower)

    p_con = sub.add_parser("construct", help="run a certified construction")
    con_sub = p_con.add_subparsers(dest="construction", required=True)

    p_app = con_sub.add_parser("approximate")
    common(p_app)
    p_app.add_argument("--set", dest="set_file", type=Path, required=True)
    p_app.add_argument("--target", type=Path, required=True)
    p_app.add_argument("--eps", type=str, required=True)
    p_app.add_argument("--cap", type=int, default=1 << 25)
    p_app.set_defaults(handler=_cmd_construct_approximate)

    p_flat = con_sub.add_parser("flatten")
    common(p_flat)
    p_flat.add_argument("--set", dest="set_file", type=Path, required=True)
    p_flat.add_argument("--eps", type=str, required=True)
    p_flat.add_argument("--min-time", type=int, default=1)
    p_flat.set_defaults(handler=_cmd_construct_flatten)

    p_seq = con_sub.add_parser("flatten-seq")
    common(p_seq)
    p_seq.add_argument("--set", dest="set_file", type=Path, required=True)
    p_seq.add_argument("--eps", type=str, required=True)
    p_seq.add_argument("--steps", type=int, required=True)
    p_seq.set_defaults(handler=_cmd_construct_flatten_seq)

    p_tgt = con_sub.add_parser("targets")
    common(p_tgt)
    p_tgt.add_argument("--config", type=Path, required=True)
    p_tgt.add_argument("--cap", type=int, default=1 << 25)
    p_tgt.set_defaults(handler=_cmd_construct_targets)

    p_ver = sub.add_parser("verify", help="re-check all claims of a manifest")
    p_ver.add_argument("manifest", type=Path)
    p_ver.set_defaults(handler=_cmd_verify)
    return parser


def _load_set(path) -> IntervalSet:
    with open(path, "r", encoding="utf-8") as fh:
        return IntervalSet.from_json(json.load(fh))


def _load_measure(path) -> DiscreteMeasure:
    with open(path, "r", encoding="utf-8") as fh:
        return DiscreteMeasure.from_json(json.load(fh))


def _write_json(path, data):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(data))


def _write_cdf_csv(path, measure: DiscreteMeasure):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "t_exact", "F", "F_exact"])
        total = Fraction(0)
        for v, m in measure.atoms:
            total += m
            writer.writerow(
                [decimal_render(v), format_fraction(v),
                 decimal_render(total), format_fraction(total)]
            )


def _maybe_figure(args, path, measures, title):
    if args.no_figures:
        return
    from .figures import save_cdf_figure

    save_cdf_figure(path, measures, title)


def _cmd_law(args) -> int:
    seq = make_sequence(args.seq, args.horizon)
    b = _load_set(args.set_file)
    report = exact_law(b, args.n, seq, with_cells=args.cells)
    args.out.mkdir(parents=True, exist_ok=True)
    _write_json(args.out / "law.json", report.to_json(include_cells=args.cells))
    _write_cdf_csv(args.out / "law_cdf.csv", report.law)
    overlays = [("law", report.law)]
    if args.target:
        overlays.append(("target", _load_measure(args.target)))
    _maybe_figure(args, args.out / "law_cdf.png", overlays,
                  f"normalized Birkhoff law at n={args.n}")
    print(f"law at n={args.n}: {len(report.law.atoms)} atoms, "
          f"mu(B)={format_fraction(report.mu_B)}")
    return 0


def _cmd_levy(args) -> int:
    a = _load_measure(args.a_file)
    b = _load_measure(args.b_file)
    lo, hi = levy_distance(a, b, parse_fraction(args.tol))
    args.out.mkdir(parents=True, exist_ok=True)
    _write_json(
        args.out / "levy.json",
        {"lo": format_fraction(lo), "hi": format_fraction(hi),
         "tol": args.tol},
    )
    _write_cdf_csv(args.out / "levy_a_cdf.csv", a)
    _write_cdf_csv(args.out / "levy_b_cdf.csv", b)
    _maybe_figure(args, args.out / "levy_cdf.png",
                  [("a", a), ("b", b)],
                  f"Levy bracket [{lo}, {hi}]")
    print(f"levy bracket: [{format_fraction(lo)}, {format_fraction(hi)}]")
    return 0


def _cmd_tower(args) -> int:
    tower = rokhlin_tower(args.height, parse_fraction(args.gamma))
    args.out.mkdir(parents=True, exist_ok=True)
    _write_json(args.out / "tower.json", tower.to_json())
    print(f"tower height {tower.height}: junk measure "
          f"{format_fraction(tower.junk.measure())}")
    return 0


def _construct_common(args, command, config, outputs, figure_measures, title):
    args.out.mkdir(parents=True, exist_ok=True)
    manifest = build_manifest(command, config, outputs)
    write_manifest(args.out / "manifest.json", manifest)
    if figure_measures:
        _maybe_figure(args, args.out / "construct_cdf.png", figure_measures, title)
    print(f"manifest written to {args.out / 'manifest.json'}")
    return 0


def _cmd_construct_approximate(args) -> int:
    seq = make_sequence(args.seq, args.horizon)
    a = _load_set(args.set_file)
    nu = _load_measure(args.target)
    eps = parse_fraction(args.eps)
    cert = approximate_on_disjoint(a, nu, eps, seq, n_cap=args.cap)
    n = int(cert.parameters["n"])
    law = exact_law(cert.output_set, n, seq).law
    config = {"command": "construct approximate", "eps": args.eps,
              "cap": args.cap, "seq": seq.to_json()}
    return _construct_common(
        args, "construct approximate", config,
        {"certificate": certificate_to_json(cert)},
        [("achieved", law), ("target", nu)],
        f"disjoint approximation at n={n}",
    )


def _cmd_construct_flatten(args) -> int:
    seq = make_sequence(args.seq, args.horizon)
    a = _load_set(args.set_file)
    eps = parse_fraction(args.eps)
    cert = flatten_at(a, eps, args.min_time, seq)
    n = int(cert.parameters["n"])
    law = exact_law(cert.output_set, n, seq).law
    config = {"command": "construct flatten", "eps": args.eps,
              "min_time": args.min_time, "seq": seq.to_json()}
    return _construct_common(
        args, "construct flatten", config,
        {"certificate": certificate_to_json(cert)},
        [("achieved", law), ("point mass", DIRAC_ZERO)],
        f"flattened law at n={n}",
    )


def _cmd_construct_flatten_seq(args) -> int:
    seq = make_sequence(args.seq, args.horizon)
    a = _load_set(args.set_file)
    eps = parse_fraction(args.eps)
    ledger = flatten_subsequence(a, eps, args.steps, seq)
    config = {"command": "construct flatten-seq", "eps": args.eps,
              "steps": args.steps, "seq": seq.to_json()}
    last_n = ledger.steps[-1].n_k
    law = exact_law(ledger.final_set, last_n, seq).law
    return _construct_common(
        args, "construct flatten-seq", config,
        {"certificate": ledger_to_json(ledger, a, args.steps, seq)},
        [("final law", law), ("point mass", DIRAC_ZERO)],
        f"flattened subsequence, last time n={last_n}",
    )


def _cmd_construct_targets(args) -> int:
    seq = make_sequence(args.seq, args.horizon)
    with open(args.config, "r", encoding="utf-8") as fh:
        config_data = json.load(fh)
    a0 = IntervalSet.from_json(config_data.get("initial_set", []))
    targets = [
        (DiscreteMeasure.from_json(row["law"]), parse_fraction(row["eps"]))
        for row in config_data["targets"]
    ]
    cap = int(config_data.get("cap", args.cap))
    cert = realize_targets(a0, targets, seq, n_cap=cap)
    figure_measures = []
    for row in cert.parameters["steps"]:
        n_j = int(row["n"])
        law = exact_law(cert.output_set, n_j, seq).law
        figure_measures.append((f"law at n={n_j}", law))
    for j, (nu, _) in enumerate(targets, start=1):
        figure_measures.append((f"target {j}", nu))
    config = {"command": "construct targets", "config": config_data,
              "seq": seq.to_json()}
    return _construct_common(
        args, "construct targets", config,
        {"certificate": certificate_to_json(cert)},
        figure_measures,
        "realized target laws",
    )


def _cmd_verify(args) -> int:
    manifest = read_manifest(args.manifest)
    ok, report = verify_manifest(manifest)
    for line in report:
        print(line)
    if ok:
        print("verification passed")
        return 0
    print("verification FAILED", file=sys.stderr)
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
