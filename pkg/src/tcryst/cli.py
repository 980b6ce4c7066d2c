"""Command-line interface: ``tcryst <subcommand> [flags]``.

Exit codes: 0 success, 2 usage, 3 budget, 4 spectral-sequence failure,
5 duality mismatch, 6 cocycle violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import ahss, atomic, crystal, groups, pcw, tduality

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_SPECTRAL = 4
EXIT_MISMATCH = 5
EXIT_COCYCLE = 6


class UsageError(ValueError):
    """Invalid flag values detected after parsing."""


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=False)


# subcommands


def cmd_enumerate(args) -> str:
    types = list(crystal.MAGNETIC_TYPES) if args.type == "all" else [args.type]
    entries = []
    for t in types:
        entries.extend(crystal.enumerate_magnetic(args.dim, t))
    counts = {t: sum(1 for e in entries if e.mtype == t) for t in types}
    if args.format == "json":
        return _dump({"dim": args.dim, "type": args.type, "counts": counts, "total": len(entries),
                      "entries": [e.to_json() for e in entries]})
    lines = [f"{e.mtype:<5} {e.label}" for e in entries]
    lines.append("counts: " + ", ".join(f"{t}={c}" for t, c in counts.items()) + f"; total={len(entries)}")
    return "\n".join(lines)


def _load_group(ref: str) -> groups.FiniteGroup:
    path = Path(ref)
    if path.suffix == ".json" and path.exists():
        return groups.FiniteGroup.from_json(json.loads(path.read_text(encoding="utf-8")))
    try:
        return groups.named_group(ref)
    except (KeyError, crystal.UnknownGroup) as exc:
        raise UsageError(f"unknown group {ref!r}") from exc


def cmd_cohomology(args) -> str:
    g = _load_group(args.group)
    try:
        phi = groups.parse_phi(args.phi, g)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    coeff = args.coeff
    if coeff == "T":
        if args.degree < 1:
            raise UsageError("circle coefficients need degree >= 1")
        h = groups.group_cohomology_T(g, phi, args.degree, budget=args.budget)
    else:
        if coeff == "Z":
            n = 0
        elif coeff == "Z2":
            n = 2
        elif coeff.startswith("ZN:") and coeff[3:].isdigit() and int(coeff[3:]) >= 2:
            n = int(coeff[3:])
        else:
            raise UsageError(f"bad coefficient {coeff!r}; use Z2, Z, ZN:n or T")
        if args.degree < 0:
            raise UsageError("negative degree")
        h = groups.group_cohomology(g, groups.PhiModule(n, phi), args.degree, budget=args.budget)
    if args.format == "json":
        return _dump({"group": args.group, "coeff": coeff, "phi": list(phi), "degree": args.degree, "result": h.to_json(),
                      "text": str(h)})
    return str(h)


def cmd_ahss(args) -> str:
    inst = tduality.builtin_instance(args.example, args.cls)
    side = inst.position if args.side == "position" else inst.momentum
    res = tduality.run_side(side, inst.crystal, inst.az.shift)
    pages = [p.strip() for p in args.pages.split(",") if p.strip()]
    chosen = {"E1": res.E1, "E2": res.E2, "Einf": res.Einf}
    for p in pages:
        if p not in chosen:
            raise UsageError(f"unknown page {p!r}; use E1, E2 or Einf")
    if args.format == "json":
        return _dump({"example": inst.label, "side": args.side, "class": inst.az.name,
                      "pages": {p: chosen[p].to_json() for p in pages}})
    blocks = [ahss.render_page(chosen[p], f"{inst.label} {args.side} {inst.az.name} {p}") for p in pages]
    return "\n\n".join(blocks)


def _parse_classes(text: str) -> list[ahss.AZClass]:
    if text == "all":
        return ahss.AZClass.all()
    try:
        return [ahss.AZClass(c.strip()) for c in text.split(",") if c.strip()]
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_tduality(args) -> str:
    classes = _parse_classes(args.classes)
    inst = tduality.builtin_instance(args.example)
    reports = tduality.full_report(inst.dim, inst.label, classes, jobs=args.jobs)
    if args.format == "json":
        return _dump({"example": inst.label, "twists": inst.twists, "reports": [r.to_json() for r in reports]})
    return "\n\n".join(r.render() for r in reports)


def _atomic_report(args, inv: atomic.AtomicInvariant, group: str, header: list[str], extra: dict) -> str:
    verdicts = {}
    for name, cl in atomic.load_claims().items():
        if cl["group"] == group:
            vec = inv.vector(cl["points"], cl.get("chern", True))
            verdicts[name] = {"in_span": atomic.membership_check([vec], cl["generators"])["contained"]}
    if args.format == "json":
        return _dump({**extra, "invariant": inv.to_json(), "claims": verdicts})
    lines = list(header)
    for k, g, n, mult in inv.points:
        lines.append(f"  k={atomic._fmt(k)}  generator {g} (order {n})  multiplicities {list(mult)}")
    lines.append(f"  chern {inv.chern}")
    for name, v in verdicts.items():
        lines.append(f"claim {name}: {'inside span' if v['in_span'] else 'outside span'}")
    return "\n".join(lines)


def cmd_atomic(args) -> str:
    if args.displayed:
        try:
            res = atomic.resolve_displayed_example(args.displayed)
        except KeyError as exc:
            raise UsageError(f"no displayed example {args.displayed!r}") from exc
        if args.format == "json":
            return _dump(res)
        lines = [f"{res['name']} displayed data: " + ("valid" if not res["displayed_problems"] else "invalid")]
        lines.extend(f"  {p}" for p in res["displayed_problems"])
        if "displayed_matches_induced" in res:
            lines.append(f"  matches induced bundle: {res['displayed_matches_induced']}")
        for sub in res["substitutes"]:
            state = "valid" if sub["valid"] else "invalid"
            if sub["valid"]:
                state += ", matches induced bundle" if sub["matches_induced"] else ", differs from induced bundle"
            lines.append(f"substitute {sub['label']}: {state}")
        return "\n".join(lines)
    if args.bundle:
        try:
            data = json.loads(args.bundle.read_text(encoding="utf-8"))
            if "group" not in data:
                data["group"] = args.group
            b = atomic.EquivariantBundleData.from_json(data)
        except (OSError, KeyError, ValueError) as exc:
            if isinstance(exc, atomic.CocycleViolation):
                raise
            raise UsageError(f"cannot read bundle {args.bundle}: {exc}") from exc
        inv = atomic.atomic_invariant(b)
        header = [f"bundle {args.bundle.name} over {b.group.name}: rank {b.rank}"]
        return _atomic_report(args, inv, b.group.name, header, {"bundle": b.to_json()})
    try:
        w = atomic.wyckoff(args.group, args.wyckoff)
    except (KeyError, crystal.UnknownGroup) as exc:
        raise UsageError(str(exc)) from exc
    try:
        rep = atomic.RepRingElement.parse(args.rep, w.order)
    except ValueError as exc:
        raise UsageError(f"bad representation {args.rep!r}") from exc
    try:
        b = atomic.induce_bundle(w, rep)
    except atomic.VirtualRep as exc:
        raise UsageError(f"virtual representation {exc}") from exc
    inv = atomic.atomic_invariant(b)
    header = [
        f"group {w.group.name}, Wyckoff {w.letter}: representative {atomic._fmt(w.representative)}, "
        f"stabilizer order {w.order}, multiplicity {w.multiplicity}",
        f"representation {rep}; bundle rank {b.rank}",
    ]
    return _atomic_report(args, inv, w.group.name, header,
                          {"wyckoff": w.to_json(), "rep": str(rep), "bundle": b.to_json()})


def cmd_tables(args) -> str:
    rows = []
    for dim in (1, 2):
        for sg in crystal.space_group_names(dim):
            r = pcw.table_row(sg)
            rows.append((sg, r))
    if args.format == "json":
        return _dump([{"group": sg, **{k: str(v) for k, v in r.items()}} for sg, r in rows])
    w1 = max(len(str(r["H1(dual)"])) for _, r in rows) + 2
    w2 = max(len(str(r["H1(pt)"])) for _, r in rows) + 2
    lines = [f"{'group':<6} {'H1(dual)':<{w1}} {'H1(pt)':<{w2}} reduced"]
    for sg, r in rows:
        lines.append(f"{sg:<6} {str(r['H1(dual)']):<{w1}} {str(r['H1(pt)']):<{w2}} {r['reduced']}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tcryst", description="Twisted crystallographic K-theory toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=["text", "json"], default="text")
        sp.add_argument("--output", type=Path, help="write the report to this file")
        return sp

    sp = common(sub.add_parser("enumerate", help="magnetic space groups"))
    sp.add_argument("--dim", type=int, choices=[1, 2], required=True)
    sp.add_argument("--type", choices=["a", "b", "c-i", "c-ii", "all"], default="all")
    sp.set_defaults(func=cmd_enumerate)

    sp = common(sub.add_parser("cohomology", help="group cohomology with twisted coefficients"))
    sp.add_argument("--group", required=True, help="trivial, Zn, Z2xZ2, Dn, <sg>-point or a JSON file")
    sp.add_argument("--coeff", default="Z", help="Z2, Z, ZN:n or T")
    sp.add_argument("--phi", default=None, help="none, id, pr1, pr2 or comma-separated bits")
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--budget", type=int, default=groups.DEFAULT_BUDGET)
    sp.set_defaults(func=cmd_cohomology)

    sp = common(sub.add_parser("ahss", help="spectral sequence pages"))
    sp.add_argument("--example", required=True)
    sp.add_argument("--side", choices=["position", "momentum"], required=True)
    sp.add_argument("--class", dest="cls", default="AI", choices=[c.name for c in ahss.AZClass.all()])
    sp.add_argument("--pages", default="E1,E2")
    sp.set_defaults(func=cmd_ahss)

    sp = common(sub.add_parser("tduality", help="K-groups resolved by T-duality"))
    sp.add_argument("--example", required=True)
    sp.add_argument("--classes", default="AI", help="comma-separated classes or 'all'")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_tduality)

    sp = common(sub.add_parser("atomic", help="atomic insulator invariants"))
    sp.add_argument("--group", default="p4")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--wyckoff", help="Wyckoff letter; the bundle is induced from --rep")
    src.add_argument("--bundle", type=Path, help="bundle JSON file to check and evaluate")
    src.add_argument("--displayed", help="registered displayed data to check, e.g. p4-b")
    sp.add_argument("--rep", default="1", help="e.g. 1, t, 1+t^2 or comma-separated coefficients")
    sp.set_defaults(func=cmd_atomic)

    sp = common(sub.add_parser("tables", help="magnetic cohomology tables for line and wallpaper groups"))
    sp.set_defaults(func=cmd_tables)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.func(args)
    except (UsageError, tduality.UnknownExample, crystal.UnknownGroup, pcw.UnknownComplex) as exc:
        parser.print_usage(sys.stderr)
        print(f"tcryst: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except groups.BudgetExceeded as exc:
        print(f"tcryst: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ahss.RuleGap, ahss.NotStable, ahss.RealizationError, ahss.UnsupportedCell) as exc:
        print(f"tcryst: spectral sequence failure: {exc}", file=sys.stderr)
        return EXIT_SPECTRAL
    except tduality.Mismatch as exc:
        print(f"tcryst: duality mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except atomic.CocycleViolation as exc:
        print(f"tcryst: cocycle violation: {exc}", file=sys.stderr)
        return EXIT_COCYCLE
    if args.output:
        args.output.write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
