"""Command-line front end: enumeration, verification, table diffing.

Exit codes: 0 success/match, 1 mismatch, 2 internal unknown verdict,
3 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from importlib import resources

from . import genus, linalg, pipeline, roots
from . import lattice as lat

SMOOTH_LABEL = "0"


def rows_to_json(rows):
    out = []
    for t in rows:
        entry = {
            "S": t.ssys_label,
            "mu": t.mu,
            "d": t.d,
            "c_C": t.c_complex,
            "s_C": t.s_complex,
            "real_forms": [
                {
                    "c_R": list(f.record.c_real),
                    "s_R": list(f.record.s_real),
                    "m": f.record.m_complex,
                    "m_R": f.record.m_real,
                    "families": f.record.families,
                    "sameT": f.record.same_t,
                }
                for f in t.forms
            ],
        }
        out.append(entry)
    return out


def rows_to_csv(rows_json):
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["S", "mu", "d", "c_C", "s_C", "n_real_forms",
                "c_R", "s_R", "m", "families", "sameT"])
    for r in rows_json:
        for f in r["real_forms"]:
            w.writerow([r["S"], r["mu"], r["d"], r["c_C"], r["s_C"],
                        len(r["real_forms"]),
                        "(%d,%d)" % tuple(f["c_R"]),
                        "(%d,%d,%d)" % tuple(f["s_R"]),
                        f["m"], f["families"], f["sameT"]])
    return buf.getvalue()


def load_fixture(path=None):
    if path is None:
        with resources.files("emptysextic.data").joinpath(
                "tables_fixture.json").open() as fh:
            return json.load(fh)
    with open(path) as fh:
        return json.load(fh)


def aggregate_from_json(rows_json, include_smooth=True):
    families = sum(f["families"] for r in rows_json for f in r["real_forms"])
    forms = sum(len(r["real_forms"]) for r in rows_json)
    types = len(rows_json)
    sets = len({r["S"] for r in rows_json})
    return {"families": families, "real_forms": forms,
            "complex_types": types, "singular_sets": sets}


def diff_tables(computed_json, fixture_rows):
    """Compare machine-checkable fields; returns a list of messages."""
    problems = []
    comp = {}
    for r in computed_json:
        if r["S"] == SMOOTH_LABEL:
            continue
        key = (r["S"], r["d"], r["c_C"], r["s_C"])
        if key in comp:
            problems.append(f"computed rows collide on {key}")
        comp[key] = r
    seen = set()
    for fx in fixture_rows:
        key = (fx["S"], fx["d"], fx["c_C"], fx["s_C"])
        if key in seen:
            problems.append(f"fixture rows collide on {key}")
        seen.add(key)
        got = comp.pop(key, None)
        if got is None:
            problems.append(f"missing computed row {key}")
            continue
        forms = got["real_forms"]
        if len(forms) != fx["real_forms"]:
            problems.append(
                f"{key}: real form count {len(forms)} != {fx['real_forms']}")
            continue
        fams = sorted(f["families"] for f in forms)
        if fams != [fx["families_per_form"]] * len(forms):
            problems.append(
                f"{key}: families {fams} != {fx['families_per_form']} per form")
        if fx["same_t"] is not None:
            smt = {f["sameT"] for f in forms}
            if smt != {fx["same_t"]}:
                problems.append(f"{key}: sameT {smt} != {fx['same_t']}")
        ms = sorted(f["m"] for f in forms)
        if ms != [fx["m"]] * len(forms):
            problems.append(f"{key}: stable involutions {ms} != {fx['m']}")
        if fx["forms"]:
            want = []
            for entry in fx["forms"]:
                want.append((tuple(entry.get("c_R", ())),
                             tuple(entry.get("s_R", ()))))
            have = []
            for f in forms:
                c_r = tuple(f["c_R"]) if fx["forms"][0].get("c_R") else ()
                s_r = tuple(f["s_R"]) if fx["forms"][0].get("s_R") else ()
                have.append((c_r, s_r))
            if sorted(want) != sorted(have):
                problems.append(f"{key}: form invariants {sorted(have)} != "
                                f"{sorted(want)}")
    for key in comp:
        problems.append(f"extra computed row {key}")
    return problems


def cmd_enumerate(args):
    mu_range = None
    if args.mu is not None:
        mu_range = {args.mu}
    if args.set is not None:
        if args.set == SMOOTH_LABEL:
            cands = [roots.RootSystem(())]
        else:
            cands = [roots.parse_label(args.set)]
        rows = []
        for s in cands:
            rows.extend(pipeline.process_singularity_set(s))
    else:
        rows = pipeline.classify_all(mu_range=mu_range, jobs=args.jobs,
                                     progress=(print_progress if args.verbose
                                               else None))
    data = rows_to_json(rows)
    payload = {"rows": data, "aggregate": aggregate_from_json(data)}
    text = json.dumps(payload, indent=1, sort_keys=True) if args.format == "json" \
        else rows_to_csv(data)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text + "\n")
    return 0


def print_progress(label):
    print(f"... {label}", file=sys.stderr, flush=True)


def cmd_verify(args):
    try:
        with open(args.file) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3
    try:
        ambient = lat.IntegerLattice.from_json(obj["lattice"])
        theta = linalg.mat_tuple(obj["theta"])
        h = tuple(obj["h"])
        stilde_rank = int(obj["stilde_rank"])
        sphere = tuple(obj["sphere"]) if obj.get("sphere") else None
        basis = linalg.mat_tuple(obj["basis"]) if "basis" in obj else \
            linalg.identity(ambient.rank)
    except (KeyError, TypeError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3
    rht = pipeline.RealHomologicalType(
        ambient, basis, theta, h, td_key=(), psi_coset=(), sphere=sphere)
    try:
        report = pipeline.verify_real_homological_type(rht, stilde_rank)
    except genus.UnknownVerdict as exc:
        print(f"unknown verdict: {exc}", file=sys.stderr)
        return 2
    ok = True
    for clause, verdict in report.items():
        print(f"{clause}: {'pass' if verdict else 'FAIL'}")
        ok = ok and verdict
    return 0 if ok else 1


def cmd_diff(args):
    try:
        with open(args.computed) as fh:
            computed = json.load(fh)
        fixture = load_fixture(args.fixtures)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3
    rows = computed["rows"] if isinstance(computed, dict) else computed
    problems = diff_tables(rows, fixture)
    for p in problems:
        print(p)
    if not problems:
        print("tables match")
    return 0 if not problems else 1


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="emptysextic",
        description="Classification engine for real plane sextics with "
                    "empty real point set")
    sub = ap.add_subparsers(dest="command", required=True)

    en = sub.add_parser("enumerate", help="run the classification")
    en.add_argument("--mu", type=int, default=None,
                    help="restrict to one total Milnor number")
    en.add_argument("--set", default=None,
                    help="restrict to one set of singularities, e.g. 2A5+4A2")
    en.add_argument("--all", action="store_true", help="full classification")
    en.add_argument("--jobs", type=int, default=1)
    en.add_argument("--out", default=None)
    en.add_argument("--format", choices=("json", "csv"), default="json")
    en.add_argument("--strict", action="store_true", default=True,
                    help="treat unknown verdicts as fatal (default)")
    en.add_argument("--verbose", action="store_true")
    en.set_defaults(func=cmd_enumerate)

    ve = sub.add_parser("verify", help="verify a stored quadruple")
    ve.add_argument("file")
    ve.set_defaults(func=cmd_verify)

    di = sub.add_parser("diff", help="diff a computed table against fixtures")
    di.add_argument("computed")
    di.add_argument("--fixtures", default=None)
    di.set_defaults(func=cmd_diff)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except genus.UnknownVerdict as exc:
        print(f"unknown verdict: {exc}", file=sys.stderr)
        return 2
    except pipeline.PipelineAbort as exc:
        print(f"pipeline abort: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
