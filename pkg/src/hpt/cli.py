"""Command line: validate, transfer, minimal-model, check.

Documents are JSON.  A complex document looks like

    {"format_version": "1",
     "generators": [{"name": "a", "degree": 1}, ...],
     "differential": {"u": [["1", "x"]]},
     "structure": {"kind": "associative",
                   "entries": {"a,a": [["1", "x"]]}},
     "contraction": {"cancel": [["u", "x"]]}}

with coefficients as strings "p/q" or "p".  `structure` and `contraction`
are optional; without `contraction` the transfer goes to homology.
Exit codes: 0 all checks pass, 1 a check fails, 2 usage or parse error.
"""

import argparse
import json
import os
import re
import sys
import time
from fractions import Fraction
from math import gcd

from .exactlin import GradedComplex, GradedMap, compose, identity as _identity, tensor_power
from .contraction import cancel_pair, compose_contractions, contraction_from_homology
from .report import Report
from . import transfer as _tr
from . import suites as _suites

FORMAT_VERSION = "1"
STRUCTURE_KINDS = ("associative", "lie", "ainf", "linf")


class ParseError(Exception):
    pass


class UsageError(Exception):
    pass


# --- reading --------------------------------------------------------------

def _locate(text, token):
    """1-based (line, column) of the first occurrence of token in text."""
    i = text.find(token)
    if i < 0:
        return None, None
    line = text.count("\n", 0, i) + 1
    col = i - (text.rfind("\n", 0, i) + 1) + 1
    return line, col


def _perr(path, text, token, msg):
    line, col = _locate(text, token) if token is not None else (None, None)
    where = f"{path}:{line}:{col}" if line else str(path)
    return ParseError(f"{where}: {msg}")


_RAT = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(s):
    """'p/q' or 'p' in lowest terms with q > 0."""
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise ValueError(f"coefficient {s!r} must be a string 'p/q' or 'p'")
    if isinstance(s, int):
        return Fraction(s)
    m = _RAT.match(s)
    if not m:
        raise ValueError(f"malformed coefficient {s!r}")
    p = int(m.group(1))
    q = int(m.group(2)) if m.group(2) is not None else 1
    if q == 0:
        raise ValueError(f"zero denominator in {s!r}")
    if gcd(p, q) != 1 and p != 0 or (p == 0 and q != 1):
        raise ValueError(f"coefficient {s!r} is not in lowest terms")
    return Fraction(p, q)


def format_rational(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def load_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"{path}: cannot read ({e.strerror})")
    try:
        return json.loads(text), text
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}")


def _terms(path, text, terms, names, ctx):
    if not isinstance(terms, list):
        raise _perr(path, text, None, f"{ctx}: expected a list of [coefficient, name]")
    out = {}
    for item in terms:
        if not (isinstance(item, list) and len(item) == 2):
            raise _perr(path, text, None, f"{ctx}: expected [coefficient, name], got {item!r}")
        c, t = item
        try:
            q = parse_rational(c)
        except ValueError as e:
            raise _perr(path, text, json.dumps(c), f"{ctx}: {e}")
        if t not in names:
            raise _perr(path, text, json.dumps(t), f"{ctx}: unknown element {t!r}")
        out[t] = out.get(t, 0) + q
    return {k: v for k, v in out.items() if v}


def parse_document(doc, text="", path="<input>"):
    """(complex, structure or None, cancel pairs) from a complex document
    or from the `result` field of a report document."""
    if isinstance(doc, dict) and "result" in doc and "generators" not in doc:
        doc = doc["result"]
    if not isinstance(doc, dict):
        raise _perr(path, text, None, "top level must be an object")
    if str(doc.get("format_version")) != FORMAT_VERSION:
        raise _perr(path, text, "format_version",
                    f"format_version must be {FORMAT_VERSION!r}, got {doc.get('format_version')!r}")
    gens = doc.get("generators")
    if not isinstance(gens, list):
        raise _perr(path, text, "generators", "generators must be a list")
    degs, wts = {}, {}
    for g in gens:
        if not isinstance(g, dict) or "name" not in g or "degree" not in g:
            raise _perr(path, text, None, f"generator {g!r} needs name and degree")
        name = g["name"]
        if not isinstance(name, str) or not name or "," in name:
            raise _perr(path, text, json.dumps(name), f"bad generator name {name!r}")
        if name in degs:
            raise _perr(path, text, json.dumps(name), f"duplicate generator {name!r}")
        if isinstance(g["degree"], bool) or not isinstance(g["degree"], int):
            raise _perr(path, text, json.dumps(name), f"degree of {name!r} must be an integer")
        degs[name] = g["degree"]
        if "weight" in g:
            wts[name] = g["weight"]
    if wts and len(wts) != len(degs):
        raise _perr(path, text, "weight", "either all generators carry a weight or none")
    diff = doc.get("differential", {})
    if not isinstance(diff, dict):
        raise _perr(path, text, "differential", "differential must be an object")
    dcols = {}
    for k, terms in diff.items():
        if k not in degs:
            raise _perr(path, text, json.dumps(k), f"differential of unknown element {k!r}")
        # degree mismatches are reported by validation, not here
        col = _terms(path, text, terms, degs, f"d({k})")
        if col:
            dcols[k] = col
    A = GradedComplex(degs, dcols, wts or None, check=False)
    structure = None
    if doc.get("structure") is not None:
        structure = _parse_structure(path, text, doc["structure"], A)
    cancel = []
    con = doc.get("contraction")
    if con is not None:
        pairs = con.get("cancel", []) if isinstance(con, dict) else None
        if not isinstance(pairs, list):
            raise _perr(path, text, "contraction", "contraction.cancel must be a list of pairs")
        for p in pairs:
            if not (isinstance(p, list) and len(p) == 2 and all(x in degs for x in p)):
                raise _perr(path, text, "cancel", f"bad cancel pair {p!r}")
            cancel.append(tuple(p))
    return A, structure, cancel


def _parse_structure(path, text, st, A):
    if not isinstance(st, dict) or st.get("kind") not in STRUCTURE_KINDS:
        raise _perr(path, text, "kind", f"structure.kind must be one of {', '.join(STRUCTURE_KINDS)}")
    kind = st["kind"]
    entries = st.get("entries", {})
    if not isinstance(entries, dict):
        raise _perr(path, text, "entries", "structure.entries must be an object")
    tables = {}
    for key, terms in entries.items():
        word = tuple(x.strip() for x in key.split(","))
        for x in word:
            if x not in A.basis:
                raise _perr(path, text, json.dumps(key), f"unknown element {x!r} in entry {key!r}")
        n = len(word)
        if kind in ("associative", "lie") and n != 2:
            raise _perr(path, text, json.dumps(key), f"{kind} entries must be binary, got {key!r}")
        if n < 2:
            raise _perr(path, text, json.dumps(key), f"entry {key!r}: arity must be at least 2")
        col = _terms(path, text, terms, A.basis, f"entry {key}")
        deg = sum(A.degree(x) for x in word) + n - 2
        for t in col:
            if A.degree(t) != deg:
                raise _perr(path, text, json.dumps(key),
                            f"entry {key!r} has a term {t!r} of degree {A.degree(t)}, expected {deg}")
        if col:
            tables.setdefault(n, {})[word] = col
    ops = {n: GradedMap(tensor_power(A, n), A, n - 2, cols) for n, cols in tables.items()}
    if kind in ("associative", "ainf"):
        return _tr.AInfStructure(A, ops)
    if kind == "lie" and _one_sided(tables.get(2, {})):
        # brackets listed for one ordering only; fill in antisymmetry
        return _tr.LInfStructure.from_brackets(A, tables.get(2, {}), check=False)
    return _tr.LInfStructure(A, ops)


def _one_sided(table):
    """True when no pair appears in both orders (brackets listed once)."""
    return not any((b, a) in table for (a, b) in table if a != b)


# --- writing --------------------------------------------------------------

def _entries(m):
    out = {}
    for k in sorted(m.cols, key=repr):
        col = m.cols[k]
        out[",".join(k)] = [[format_rational(c), t] for t, c in sorted(col.items(), key=repr)]
    return out


def structure_document(structure):
    A = structure.carrier
    gens = []
    for k in A.basis:
        g = {"name": k, "degree": A.degree(k)}
        gens.append(g)
    diff = {k: [[format_rational(c), t] for t, c in sorted(col.items(), key=repr)]
            for k, col in sorted(A.d.cols.items(), key=lambda x: repr(x[0]))}
    entries = {}
    for n in sorted(structure.ops):
        if n >= 2:
            entries.update(_entries(structure.ops[n]))
    return {"format_version": FORMAT_VERSION, "generators": gens, "differential": diff,
            "structure": {"kind": structure.kind, "entries": entries}}


def _morphism_document(F):
    return {str(n): _entries(F[n]) for n in sorted(F.components)}


def _check_list(report):
    return [c.as_dict() for c in report.checks]


def write_report(doc, output):
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w") as fh:
            fh.write(text)


def _base(command, args):
    return {"format_version": FORMAT_VERSION,
            "command": {"name": command, **{k: v for k, v in sorted(args.items())}}}


# --- commands -------------------------------------------------------------

def _max_arity(n):
    cap = int(os.environ.get("HPT_MAX_ARITY", "6"))
    if n < 2:
        raise UsageError("--max-arity must be at least 2")
    if n > cap:
        raise UsageError(f"--max-arity {n} exceeds HPT_MAX_ARITY={cap}")
    return n


def _validate_report(A, structure, N=None):
    r = Report("validate")
    bad = next(((k, t) for k, col in sorted(A.d.cols.items()) for t in sorted(col)
                if A.degree(t) != A.degree(k) - 1), None)
    r.add("d has degree -1", bad is None, bad)
    dd = compose(A.d, A.d)
    r.add("d^2 = 0", dd.is_zero(), dd.first_nonzero())
    if structure is not None and dd.is_zero() and bad is None:
        r.extend(_tr.verify_structure(structure, N), "")
    return r


def cmd_validate(args):
    doc, text = load_json(args.input)
    A, structure, _ = parse_document(doc, text, args.input)
    r = _validate_report(A, structure)
    out = _base("validate", {"input": args.input})
    out["status"] = "pass" if r.passed else "fail"
    out["checks"] = _check_list(r)
    return r.passed, out


def _kind_check(structure, want):
    if structure is None:
        raise UsageError("the input has no structure")
    if want == "ainf" and structure.kind != "ainf":
        raise UsageError("--type ainf needs an associative or ainf structure")
    if want == "linf" and structure.kind != "linf":
        raise UsageError("--type linf needs a lie or linf structure")


def _contraction(A, cancel):
    if not cancel:
        return contraction_from_homology(A)
    c = None
    X = A
    for x, y in cancel:
        if x not in X.basis or y not in X.basis or not X.d.cols.get(x, {}).get(y):
            raise UsageError(f"cannot cancel ({x}, {y}): <d{x}, {y}> is zero")
        step = cancel_pair(X, x, y)
        c = step if c is None else compose_contractions(c, step)
        X = step.B
    return c


def _run_transfer(args, minimal):
    doc, text = load_json(args.input)
    A, structure, cancel = parse_document(doc, text, args.input)
    N = _max_arity(args.max_arity)
    _kind_check(structure, args.type)
    pre = _validate_report(A, structure)
    if not pre.passed:
        out = _base("minimal-model" if minimal else "transfer", _echo(args))
        out["status"] = "fail"
        out["checks"] = _check_list(pre)
        return False, out
    t0 = time.perf_counter()
    c = contraction_from_homology(A) if minimal else _contraction(A, cancel)
    if structure.carrier is not c.A:
        structure = type(structure)(c.A, {n: m for n, m in structure.ops.items() if n > 1})
    res = _tr.transfer(_tr.TransferJob(c, structure, N))
    r = Report("transfer")
    r.extend(_tr.verify_structure(res.structure, N), "identities: ")
    FG = compose(res.perturbed.f, res.perturbed.g)
    r.add_map_equal("F'G' = 1", FG, _identity(FG.source))
    ind = _tr.induced_binary(structure, c)
    m2 = res.structure.op(2)
    r.add("m_2 is induced", m2 == ind.retarget(m2.source, m2.target), None)
    r.extend(_tr.check_homology_inverse(c, res.F, res.G), "")
    if minimal:
        r.add("m_1 = 0", res.structure.carrier.d.is_zero(), None)
    oracles = {}
    if getattr(args, "check_shuffles", False):
        rep = _tr.shuffle_vanishing_check(res.structure, N)
        r.extend(rep, "shuffles: ")
    if getattr(args, "oracle_trees", False):
        if structure.kind != "ainf" or any(n > 2 for n in structure.ops):
            raise UsageError("--oracle-trees needs an associative input")
        ref = {n: res.structure.op(n) for n in range(2, min(N, 3) + 1)}
        good = _tr.calibrate_tree_signs(structure, c, ref, tuple(sorted(ref)))
        rule = _tr.preferred_rule(good)
        if rule is None:
            r.add("tree oracle calibration", False, None)
        else:
            o = _tr.tree_formula_oracle(structure, c, min(N, 4), rule)
            for n in range(2, min(N, 4) + 1):
                a, b = o.op(n), res.structure.op(n)
                r.add(f"tree oracle arity {n}", a == b.retarget(a.source, a.target), None)
            oracles["tree_sign_rule"] = list(rule)
            oracles["matching_rules"] = [list(v) for v in good]
    elapsed = time.perf_counter() - t0
    out = _base("minimal-model" if minimal else "transfer", _echo(args))
    out["status"] = "pass" if r.passed else "fail"
    out["checks"] = _check_list(r)
    out["result"] = structure_document(res.structure)
    out["operations"] = {str(n): _entries(res.structure.op(n)) for n in range(1, N + 1)}
    out["morphisms"] = {"F": _morphism_document(res.F), "G": _morphism_document(res.G)}
    if oracles:
        out["oracles"] = oracles
    if getattr(args, "timing", False):
        out["timing"] = {"seconds": round(elapsed, 3)}
    return r.passed, out


def _echo(args):
    d = {k: v for k, v in vars(args).items() if k not in ("func", "output", "command")}
    return d


def cmd_transfer(args):
    return _run_transfer(args, minimal=False)


def cmd_minimal_model(args):
    return _run_transfer(args, minimal=True)


def cmd_check(args):
    if args.cases < 0:
        raise UsageError("--cases must be non-negative")
    rep = _suites.run_suite(args.suite, args.seed, args.cases)
    out = _base("check", _echo(args))
    out["status"] = "pass" if rep.passed else "fail"
    out["checks"] = _check_list(rep)
    return rep.passed, out


# --- entry point ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="hpt", description="Homological perturbation and homotopy transfer.")
    sub = p.add_subparsers(dest="command")
    v = sub.add_parser("validate", help="check d^2 = 0 and structure identities")
    v.add_argument("input")
    v.add_argument("-o", "--output", default="-")
    v.set_defaults(func=cmd_validate)
    for name, fn in (("transfer", cmd_transfer), ("minimal-model", cmd_minimal_model)):
        t = sub.add_parser(name, help=f"{name.replace('-', ' ')} of an A-infinity or L-infinity structure")
        t.add_argument("input")
        t.add_argument("--type", choices=("ainf", "linf"), required=True)
        t.add_argument("--max-arity", type=int, default=4)
        if name == "transfer":
            t.add_argument("--check-shuffles", action="store_true")
            t.add_argument("--oracle-trees", action="store_true")
        t.add_argument("--timing", action="store_true", help="include wall time (not byte-stable)")
        t.add_argument("-o", "--output", default="-")
        t.set_defaults(func=fn)
    c = sub.add_parser("check", help="seeded random property suites")
    c.add_argument("--suite", choices=sorted(_suites.SUITES), required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--cases", type=int, default=10)
    c.add_argument("-o", "--output", default="-")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    p = build_parser()
    try:
        args = p.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a command is required (validate, transfer, minimal-model, check)")
        ok, doc = args.func(args)
    except (UsageError, ParseError) as e:
        sys.stderr.write(f"hpt: error: {e}\n")
        return 2
    write_report(doc, args.output)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
