"""Command-line front end: ``tropos <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import serialize
from .abelian import Presentation, abelianize, parse_presentation
from .alexander import (
    BnsFixture,
    MinorCapExceeded,
    audit_inclusion,
    bnsr_upper_bound,
    chain_upper_bound,
    dwyer_fried_region,
    dwyer_fried_test,
    fox_identity_holds,
    fox_matrix,
    jump_ideal,
    parse_chain_data,
    presentation_complex,
)
from .catalog import (
    OrbifoldData,
    WeightedGraph,
    jump_loci_wraag,
    kahler_classify,
    maximally_disconnected_subsets,
    orbifold_report,
    wraag_oracle_check,
)
from .laurent import UndecidedTorsion, Valuation, format_poly, parse_poly, parse_polys
from .plotting import RenderError, render_svg, write_svg
from .tropical import (
    Provenance,
    combine_provenance,
    parse_ring,
    sphere_project,
    trop_hypersurface_Z,
    trop_hypersurface_field,
    trop_Z_decomposition,
)


class CliError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers


def _valuations(spec: str) -> list[Valuation]:
    if spec == "all":
        return []
    return [Valuation.parse(spec)]


def load_presentation(arg: str) -> Presentation:
    from .worked_examples import presentations

    if os.path.exists(arg):
        return parse_presentation(Path(arg).read_text())
    builtin = presentations()
    if arg in builtin:
        return builtin[arg]
    raise CliError(f"{arg!r} is neither a file nor a built-in presentation ({', '.join(builtin)})")


def _emit(args, doc: dict, text: str | None = None) -> None:
    out = serialize.dumps(doc) if args.format == "json" or text is None else text
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)


def _svg(path, obj, title=None):
    if path:
        write_svg(obj, path, title)


# ---------------------------------------------------------------------------
# commands


def cmd_trop(args):
    f = parse_poly(args.poly)
    vals = _valuations(args.val)
    if not vals:
        from .tropical import decomposition_families

        vals = [v for _, v in decomposition_families(f)]
    results = []
    lines = []
    for v in vals:
        R = trop_hypersurface_field(f, v)
        S = sphere_project(R)
        results.append({"valuation": str(v), "region": R, "sphere": S})
        lines.append(f"{v}: {len(R.cells)} cells, sphere {S.describe() if R.n <= 2 else '(n > 2)'}")
        for d in R.diagnostics:
            lines.append(f"  note: {d}")
    if args.svg:
        if len(vals) != 1:
            raise CliError("--svg needs a single valuation")
        _svg(args.svg, results[0]["region"], f"Trop({format_poly(f)}), {vals[0]}")
    prov = combine_provenance(*[r["region"].provenance for r in results])
    payload = results[0] if len(results) == 1 else {"families": results}
    _emit(args, serialize.document("trop", {"polynomial": format_poly(f), **payload}, prov),
          "\n".join(lines) + "\n")


def cmd_tropz(args):
    f = parse_poly(args.poly)
    R = trop_hypersurface_Z(f)
    S = sphere_project(R)
    fams = trop_Z_decomposition(f)
    S_union = sphere_project(fams[0][1]).union(*[sphere_project(r) for _, r in fams[1:]])
    eq = S.equals(S_union)
    verdict = "UNKNOWN" if eq is not True and eq is not False else ("PASS" if eq else "FAIL")
    doc = serialize.document("tropz", {
        "polynomial": format_poly(f),
        "region": R,
        "sphere": S,
        "decomposition": [{"family": lab, "region": r, "sphere": sphere_project(r)} for lab, r in fams],
        "decomposition_sphere": S_union,
        "sphere_equality": verdict,
    }, R.provenance)
    text = [f"Trop_Z({format_poly(f)}): {len(R.cells)} cells", f"sphere: {S.describe()}"]
    for lab, r in fams:
        text.append(f"  {lab}: sphere {sphere_project(r).describe()}")
    text.append(f"sphere equals union of families: {verdict}")
    if args.svg_dir:
        d = Path(args.svg_dir)
        d.mkdir(parents=True, exist_ok=True)
        if R.n <= 2:
            write_svg(R, d / "tropz_region.svg")
            write_svg(S, d / "tropz_sphere.svg")
            for lab, r in fams:
                safe = lab.replace(",", "_")
                write_svg(r, d / f"trop_{safe}.svg")
    _emit(args, doc, "\n".join(text) + "\n")


def cmd_fox(args):
    P = load_presentation(args.presentation)
    ab = abelianize(P)
    F = fox_matrix(P, ab)
    ok = fox_identity_holds(P, ab)
    doc = serialize.document("fox", {
        "generators": list(P.generators),
        "abelianization": {"rank": ab.group.rank, "torsion": list(ab.group.torsion),
                           "labels": list(ab.group.labels)},
        "generator_images": [list(g) for g in ab.generator_images],
        "matrix": F,
        "fox_identity": ok,
    }, Provenance.EXACT)
    text = [f"H = {ab.group}"]
    for g, row in zip(P.generators, F):
        text.append(f"d/d{g}: " + " | ".join(format_poly(x) for x in row))
    text.append(f"fundamental identity: {'holds' if ok else 'FAILS'}")
    _emit(args, doc, "\n".join(text) + "\n")


def cmd_jump(args):
    if args.chain:
        C = parse_chain_data(Path(args.chain).read_text(), transpose=args.transpose)
    else:
        if not args.presentation:
            raise CliError("give a presentation or --chain FILE")
        C = presentation_complex(load_presentation(args.presentation))
    J = jump_ideal(C, args.degree, args.minor_cap)
    doc = serialize.document("jump", {
        "degree": J.degree,
        "generators": list(J.generators),
        "principal_part": J.principal_part,
        "residual": list(J.residual),
    }, Provenance.EXACT)
    text = [f"J^{J.degree}: {len(J.generators)} generators"]
    text += [f"  {format_poly(g)}" for g in J.generators]
    if J.principal_part is not None:
        text.append(f"principal part: {format_poly(J.principal_part)}")
        text.append("residual: " + ", ".join(format_poly(g) for g in J.residual))
    _emit(args, doc, "\n".join(text) + "\n")


def cmd_bound(args):
    if args.chain:
        C = parse_chain_data(Path(args.chain).read_text(), transpose=args.transpose)
        B = chain_upper_bound(C, args.degree, args.minor_cap)
    elif args.presentation:
        B = bnsr_upper_bound(load_presentation(args.presentation), args.minor_cap, args.degree)
    else:
        raise CliError("give a presentation or --chain FILE")
    payload = {
        "degree": args.degree,
        "trop_sphere": B.trop_sphere,
        "complement": B.complement,
        "parts": [{"degree": p.degree, "sphere": p.sphere, "provenance": p.provenance, "method": p.method}
                  for p in B.parts],
    }
    text = [f"H = {B.group}",
            f"S(Trop_Z(J<={args.degree})) = {B.trop_sphere.describe()}",
            f"bound complement = {B.complement.describe()}",
            f"provenance: {B.provenance}"]
    for p in B.parts:
        text.append(f"  J^{p.degree}: {p.method} [{p.provenance}]")
    if args.fixture:
        fx = BnsFixture.from_json(json.loads(Path(args.fixture).read_text()))
        rep = audit_inclusion(fx, B.complement, B.provenance)
        payload["audit"] = rep.to_json()
        text.append(f"fixture {fx.sigma.describe()}: included={rep.to_json()['included']} "
                    f"strict={rep.to_json()['strict']}")
    if args.svg_dir and B.n <= 2:
        d = Path(args.svg_dir)
        d.mkdir(parents=True, exist_ok=True)
        write_svg(B.trop_sphere, d / "trop_sphere.svg")
        write_svg(B.complement, d / "bound_complement.svg")
    _emit(args, serialize.document("bound", payload, B.provenance), "\n".join(text) + "\n")


def cmd_df(args):
    polys = parse_polys(args.polys)
    ring = parse_ring(args.ring)
    verdict = dwyer_fried_test(polys, ring)
    try:
        R = dwyer_fried_region(polys, ring)
    except UndecidedTorsion as exc:
        R = None
        note = str(exc)
    label = {True: "finitely generated", False: "not finitely generated"}.get(verdict, "UNKNOWN")
    payload = {"annihilator": polys, "ring": args.ring, "finitely_generated": verdict}
    if R is not None:
        payload["region"] = R
        prov = R.provenance
    else:
        payload["note"] = note
        prov = Provenance.UNKNOWN
    _emit(args, serialize.document("df", payload, prov), f"{args.ring}: {label}\n")


def cmd_raag(args):
    G = WeightedGraph.from_json(Path(args.graph).read_text())
    cap = args.vertex_cap
    W = maximally_disconnected_subsets(G, cap)
    loci = jump_loci_wraag(G, args.char, derived_charp=args.derived_charp, cap=cap)
    payload = {
        "graph": G.to_json(),
        "characteristic": args.char,
        "maximally_disconnected": [sorted(w, key=G.vertices.index) for w in W],
        "components": [sorted(w, key=G.vertices.index) for w in loci.components],
        "full_torus": loci.full_torus,
    }
    text = [f"V^1 (char {args.char}): {loci.describe()}"]
    prov = Provenance.EXACT
    if args.char:
        bad = wraag_oracle_check(G, args.char, seed=args.seed)
        payload["oracle_disagreements"] = bad
        if bad:
            prov = Provenance.UNKNOWN
            text.append("oracle disagrees with the edge-deletion rule:")
            text += [f"  {b}" for b in bad]
    if args.classify:
        k = kahler_classify(G)
        payload["kahler"] = k
        text.append(f"Kahler: {k['kahler']} ({k['reason']})")
    _emit(args, serialize.document("raag", payload, prov), "\n".join(text) + "\n")


def cmd_orbifold(args):
    mu = tuple(int(m) for m in args.mu.split(",") if m.strip()) if args.mu else ()
    d = OrbifoldData(args.genus, mu)
    rep = orbifold_report(d, args.char)
    payload = {"genus": d.genus, "mu": list(d.mu), "characteristic": args.char, **rep}
    text = [f"chi^orb = {rep['chi']}, theta = {rep['theta']}, case: {rep['case']}",
            f"V^1 = {rep['V1']}", f"Trop = {rep['trop']}", f"Sigma^1 = {rep['sigma']}"]
    _emit(args, serialize.document("orbifold", payload, Provenance.EXACT), "\n".join(text) + "\n")


def cmd_examples(args):
    from .worked_examples import run_examples

    items = run_examples()
    rows = ["item\tstatus\tdetail"] + [f"{it.name}\t{it.status}\t{it.detail}" for it in items]
    report = "\n".join(rows) + "\n"
    if args.outdir:
        out = Path(args.outdir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.tsv").write_text(report)
        for it in items:
            for name, obj in it.figures.items():
                if obj.n <= 2:
                    write_svg(obj, out / f"{name}.svg", name)
    sys.stdout.write(report)
    failed = [it.name for it in items if not it.ok]
    if failed:
        sys.stderr.write(f"{len(failed)} item(s) failed: {', '.join(failed)}\n")
        return 1
    return 0


def cmd_render(args):
    doc = json.loads(Path(args.input).read_text())
    obj = serialize.load_drawable(doc, args.key)
    svg = render_svg(obj, args.title)
    if args.output:
        Path(args.output).write_text(svg)
    else:
        sys.stdout.write(svg)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--minor-cap", type=int, default=None, help="maximum number of minors to expand")
    common.add_argument("--vertex-cap", type=int, default=None, help="maximum graph size for subset search")

    p = argparse.ArgumentParser(prog="tropos", description="Tropical bounds for BNSR invariants.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("trop", parents=[common], help="tropical hypersurface over a valued field")
    s.add_argument("poly")
    s.add_argument("--val", default="trivial", help="trivial | padic:p | modp:p | all")
    s.add_argument("--svg", metavar="PATH", help="draw the region (n <= 2)")
    s.set_defaults(func=cmd_trop)

    s = sub.add_parser("tropz", parents=[common], help="tropicalization over Z with its decomposition")
    s.add_argument("poly")
    s.add_argument("--svg-dir", metavar="DIR")
    s.set_defaults(func=cmd_tropz)

    s = sub.add_parser("fox", parents=[common], help="abelianized Fox matrix of a presentation")
    s.add_argument("presentation", help="presentation file or built-in name")
    s.set_defaults(func=cmd_fox)

    s = sub.add_parser("jump", parents=[common], help="jump ideal generators")
    s.add_argument("presentation", nargs="?")
    s.add_argument("--chain", metavar="FILE", help="read boundary matrices instead of a presentation")
    s.add_argument("--transpose", action="store_true", help="chain file matrices are given row-major by source")
    s.add_argument("--degree", type=int, default=1)
    s.set_defaults(func=cmd_jump)

    s = sub.add_parser("bound", parents=[common], help="tropical upper bound for Sigma^k(G; Z)")
    s.add_argument("presentation", nargs="?")
    s.add_argument("--chain", metavar="FILE", help="read boundary matrices instead of a presentation")
    s.add_argument("--transpose", action="store_true", help="chain file matrices are given row-major by source")
    s.add_argument("--degree", type=int, default=1)
    s.add_argument("--fixture", metavar="FILE", help="audit a stored invariant against the bound")
    s.add_argument("--svg-dir", metavar="DIR")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("df", parents=[common], help="finite generation test from annihilator generators")
    s.add_argument("polys", nargs="+")
    s.add_argument("--ring", default="z", help="z | q | fp:p")
    s.set_defaults(func=cmd_df)

    s = sub.add_parser("raag", parents=[common], help="weighted right-angled Artin group")
    s.add_argument("graph", help="JSON file {vertices: [...], edges: [{u, v, weight}]}")
    s.add_argument("--char", type=int, default=0)
    s.add_argument("--classify", action="store_true")
    s.add_argument("--derived-charp", action="store_true",
                   help="allow the edge-deletion rule in positive characteristic")
    s.set_defaults(func=cmd_raag)

    s = sub.add_parser("orbifold", parents=[common], help="orbifold surface group closed forms")
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--mu", default="", help="comma separated multiplicities")
    s.add_argument("--char", type=int, default=0)
    s.set_defaults(func=cmd_orbifold)

    s = sub.add_parser("examples", parents=[common], help="run the built-in worked examples")
    s.add_argument("--outdir", metavar="DIR", help="write report.tsv and SVG figures here")
    s.set_defaults(func=cmd_examples)

    s = sub.add_parser("render", parents=[common], help="draw a region or circle set from a JSON document")
    s.add_argument("input")
    s.add_argument("--key", help="dotted path to the object inside the document")
    s.add_argument("--title")
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    caps = {"TROPOS_MINOR_CAP": args.minor_cap, "TROPOS_VERTEX_CAP": args.vertex_cap}
    saved = {k: os.environ.get(k) for k in caps}
    for k, v in caps.items():
        if v is not None:
            os.environ[k] = str(v)
    try:
        return args.func(args) or 0
    except (CliError, ValueError, MinorCapExceeded, RenderError, OSError) as exc:
        sys.stderr.write(f"tropos {args.command}: error: {exc}\n")
        return 2
    finally:
        # callers embedding main() should not inherit the caps
        for k, v in saved.items():
            if v is None:
                os.environ.pop(k, None)
            else:
                os.environ[k] = v


if __name__ == "__main__":
    sys.exit(main())
