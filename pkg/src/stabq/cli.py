"""Command-line front end and the JSON code format."""

from __future__ import annotations

import json
import sys
import re
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .code import StabilizerCode, ValidationError, load_and_validate, make_code
from .ring import LatticeGroup, LaurentPoly

DATA_DIR = Path(__file__).parent / "data"


class ParseError(ValidationError):
    def __init__(self, message: str, column: int, line: int = 1):
        self.column = column
        self.line = line
        super().__init__(f"line {line}, column {column}: {message}")


def variable_table(group: LatticeGroup) -> Dict[str, int]:
    table = {}
    for i in range(group.rank):
        table[f"x{i + 1}"] = i
    for i, name in enumerate(("x", "y", "z", "w")[: group.rank]):
        table[name] = i
    for j in range(len(group.torsion)):
        table[f"u{j + 1}"] = group.rank + j
    if group.torsion:
        table["u"] = group.rank
    return table


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|(\S))")


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            out.append(("int", int(m.group(1)), start + 1))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), start + 1))
        elif m.group(3) is not None:
            out.append(("sym", m.group(3), start + 1))
        pos = m.end()
    out.append(("end", None, len(text) + 1))
    return out


def parse_poly(text: str, group: LatticeGroup, modulus: int) -> LaurentPoly:
    """Parse e.g. ``"1 - x^-1*y + 2*z^3"``; errors carry a 1-based column."""
    table = variable_table(group)
    toks = _tokens(text)
    k = 0

    def peek():
        return toks[k]

    def take():
        nonlocal k
        t = toks[k]
        k += 1
        return t

    def integer() -> int:
        sign = 1
        t = peek()
        if t[0] == "sym" and t[1] in "+-":
            take()
            sign = -1 if t[1] == "-" else 1
            t = peek()
        if t[0] != "int":
            raise ParseError("expected an integer", t[2])
        take()
        return sign * t[1]

    terms: Dict[tuple, int] = {}
    sign = 1
    t = peek()
    if t[0] == "end":
        raise ParseError("empty polynomial", t[2])
    if t[0] == "sym" and t[1] in "+-":
        take()
        sign = -1 if t[1] == "-" else 1
    while True:
        coef = 1
        exp = [0] * group.ngens
        seen_factor = False
        t = peek()
        if t[0] == "int":
            take()
            coef = t[1]
            seen_factor = True
            if peek()[0] == "sym" and peek()[1] == "*":
                take()
                t = peek()
                if t[0] != "name":
                    raise ParseError("expected a variable", t[2])
        while peek()[0] == "name":
            name_tok = take()
            if name_tok[1] not in table:
                raise ParseError(f"unknown variable {name_tok[1]!r}", name_tok[2])
            power = 1
            if peek()[0] == "sym" and peek()[1] == "^":
                take()
                power = integer()
            exp[table[name_tok[1]]] += power
            seen_factor = True
            if peek()[0] == "sym" and peek()[1] == "*":
                take()
                if peek()[0] != "name":
                    raise ParseError("expected a variable", peek()[2])
        if not seen_factor:
            raise ParseError("expected a term", peek()[2])
        key = group.normalize(exp)
        terms[key] = (terms.get(key, 0) + sign * coef) % modulus
        t = take()
        if t[0] == "end":
            break
        if t[0] == "sym" and t[1] in "+-":
            sign = -1 if t[1] == "-" else 1
            continue
        raise ParseError(f"unexpected {t[1]!r}", t[2])
    return LaurentPoly(group, modulus, terms)


def code_from_json(doc: dict) -> StabilizerCode:
    try:
        lat = doc["lattice"]
        group = LatticeGroup(int(lat.get("rank", 0)), tuple(lat.get("torsion", [])))
        qudits = [int(d) for d in doc["qudits"]]
        cols_text = doc["stabilizers"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed code: {exc}") from exc
    if not qudits:
        raise ValidationError("at least one qudit is required")
    from math import lcm
    n = lcm(*qudits)
    q = len(qudits)
    cols = []
    for c, col in enumerate(cols_text):
        if len(col) != 2 * q:
            raise ValidationError(f"stabilizer {c} has {len(col)} entries, expected {2 * q}")
        parsed = []
        for r, entry in enumerate(col):
            try:
                parsed.append(parse_poly(str(entry), group, n))
            except ParseError as exc:
                raise ParseError(f"stabilizer {c}, entry {r}: {exc}", exc.column) from None
        cols.append(parsed)
    rows = [[col[r] for col in cols] for r in range(2 * q)]
    return make_code(doc.get("name", "code"), group, qudits, rows)


def parse_code(text: str, validate: bool = True) -> StabilizerCode:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.colno, exc.lineno) from None
    code = code_from_json(doc)
    if validate:
        load_and_validate(code)
    return code


def render_code(code: StabilizerCode) -> str:
    return json.dumps(code.to_json(), indent=2)


def resolve_code_path(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    for candidate in (DATA_DIR / p.name, DATA_DIR / f"{p.name}.json"):
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"no code file {path}")


def load_code(path: str, validate: bool = True) -> StabilizerCode:
    return parse_code(resolve_code_path(path).read_text(), validate)


def bundled_codes() -> List[str]:
    return sorted(p.stem for p in DATA_DIR.glob("*.json"))


# ---------------------------------------------------------------------------
# reports

SCHEMA_VERSION = 1


class UsageError(ValidationError):
    pass


def _factors(M) -> Optional[List[int]]:
    from .fpmod import NotFinite, finite_structure
    if M.is_zero():
        return []
    try:
        return list(finite_structure(M).invariant_factors)
    except NotFinite:
        return None


def _group_text(factors: Optional[Sequence[int]]) -> str:
    if factors is None:
        return "infinite"
    if not factors:
        return "0"
    return " + ".join(f"Z_{d}" for d in factors)


def invariants_report(code: StabilizerCode) -> dict:
    from .code import code_invariants
    inv = code_invariants(code)
    return {
        "saturated": inv.saturated,
        "lagrangian": inv.lagrangian,
        "Z": _factors(inv.Z),
        "S": _factors(inv.S),
    }


def charge_rows(code: StabilizerCode, degrees: Optional[Sequence[int]] = None) -> List[dict]:
    from .charges import charge_modules
    rows = []
    for cm in charge_modules(code, degrees):
        rows.append({
            "degree": cm.degree,
            "invariant_factors": None if cm.invariant_factors is None else list(cm.invariant_factors),
            "annihilator": [f.render() for f in cm.annihilator],
            "mobile": cm.dim_zero,
            "period": cm.period,
        })
    return rows


def mobility_report(code: StabilizerCode, ell_override: Optional[int] = None) -> dict:
    from .charges import mobility
    rep = mobility(code, ell_override)
    return {
        "mobile": rep.mobile,
        "ell": rep.period,
        "nonzero_degrees": rep.nonzero,
        "offending_degrees": rep.offending,
        "message": rep.message(),
    }


def _analyze_part(code: StabilizerCode, ell_override) -> dict:
    out = {"name": code.name, "modulus": code.modulus, "D": code.D, "q": code.q, "s": code.s}
    out["invariants"] = invariants_report(code)
    out["charges"] = charge_rows(code)
    out["mobility"] = mobility_report(code, ell_override)
    return out


def analyze(code: StabilizerCode, ell_override: Optional[int] = None) -> dict:
    from .code import crt_decompose
    return {"parts": [_analyze_part(part, ell_override) for part in crt_decompose(code)]}


def _degrees_for_braid(code: StabilizerCode, degree: Optional[int]) -> Tuple[int, int]:
    from .charges import charge_modules
    D = code.D
    if D < 2:
        raise UsageError("braiding needs D >= 2")
    if degree is not None:
        if not 0 <= degree <= D - 2:
            raise UsageError(f"--degree must lie in 0..{D - 2}")
        return degree, D - 2 - degree
    for a in range(D - 1):
        qa, qb = charge_modules(code, [a, D - 2 - a])
        if not qa.is_zero() and not qb.is_zero():
            return a, D - 2 - a
    raise UsageError("no pair of nonzero charge modules in complementary degrees")


def _class_tokens(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    toks = [t.strip().replace("−", "-") for t in text.split(",")]
    if len(toks) != 2 or not all(toks):
        raise UsageError("--classes takes two entries such as 0,1 or +,-")
    return toks


def _class_column(setup, degree: int, token: str):
    """Ambient Ext column for a generator index or a momentum sector sign."""
    from .charges import charge_module, momentum_sectors, sector_projector
    code = setup.code
    cm = charge_module(code, degree)
    if cm.is_zero():
        raise UsageError(f"Q^{degree} is zero")
    nf = len(cm.structure.invariant_factors)
    token = {"p": "+", "m": "-"}.get(token, token)
    if token in ("+", "-"):
        from .gb import prime_power
        p, _ = prime_power(code.modulus)
        want = 1 if token == "+" else p - 1
        sectors = momentum_sectors(code, cm)
        hits = [i for i, s in enumerate(sectors) if s.eigenvalues and s.eigenvalues[0] == want]
        if not hits:
            raise UsageError(f"no momentum sector with x1 eigenvalue {token}1")
        proj = sector_projector(code, sectors, hits[0])
        col = setup.class_column(cm, [1] + [0] * (nf - 1))
        return [x * proj for x in col]
    try:
        k = int(token)
    except ValueError:
        raise UsageError(f"bad class {token!r}") from None
    if not 0 <= k < nf:
        raise UsageError(f"class index {k} out of range 0..{nf - 1}")
    coords = [0] * nf
    coords[k] = 1
    return setup.class_column(cm, coords)


def _generator_tokens(code: StabilizerCode, degree: int) -> List[str]:
    from .charges import charge_module
    cm = charge_module(code, degree)
    return [str(k) for k in range(len(cm.structure.invariant_factors))]


def braid(code: StabilizerCode, classes: Optional[str], degree: Optional[int],
          ell_override: Optional[int], radius: int = 2) -> dict:
    from .cech import CechSetup
    from .charges import mobility
    ell = mobility(code).require_mobile() if ell_override is None else ell_override
    a, b = _degrees_for_braid(code, degree)
    setup = CechSetup(code, ell)
    toks = _class_tokens(classes)
    left = [toks[0]] if toks else _generator_tokens(code, a)
    right = [toks[1]] if toks else _generator_tokens(code, b)
    table = []
    series = {}
    for s in left:
        phi = setup.ext_to_cech(a, _class_column(setup, a, s))
        row = []
        for t in right:
            psi = setup.ext_to_cech(b, _class_column(setup, b, t))
            om = setup.braiding_cochains(phi, psi)
            row.append(om.scalar())
            series[f"{s},{t}"] = {",".join(map(str, k)): v for k, v in sorted(om.coefficients(radius).items())}
        table.append(row)
    return {"degrees": [a, b], "ell": ell, "rows": left, "columns": right,
            "omega0": table, "series_window": radius, "series": series}


def spin(code: StabilizerCode, classes: Optional[str], ell_override: Optional[int]) -> dict:
    from .cech import CechSetup, excitation, topological_spin
    from .charges import mobility
    if code.D != 2:
        raise UsageError("topological spin is defined for two-dimensional codes")
    ell = ell_override if ell_override is not None else mobility(code).require_mobile()
    setup = CechSetup(code, ell)
    toks = [t.strip() for t in classes.split(",")] if classes else _generator_tokens(code, 0)
    values = {}
    for t in toks:
        e = excitation(setup, _class_column(setup, 0, t))
        values[t] = topological_spin(setup, e)
    return {"ell": ell, "spin": values}


def cocycle(code: StabilizerCode, classes: Optional[str], degree: Optional[int],
            ell_override: Optional[int]) -> dict:
    from .cech import CechSetup
    from .charges import mobility
    i = degree or 0
    ell = ell_override if ell_override is not None else mobility(code).require_mobile()
    setup = CechSetup(code, ell)
    toks = [t.strip() for t in classes.split(",")] if classes else _generator_tokens(code, i)
    out = {}
    for t in toks:
        out[t] = setup.ext_to_cech(i, _class_column(setup, i, t)).to_json()
    return {"degree": i, "ell": ell, "cochains": out}


def _parse_sides(text: Optional[str], D: int) -> Tuple[int, ...]:
    if text is None:
        return (4,) * D
    try:
        sides = tuple(int(x) for x in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"bad --sides {text!r}") from None
    if len(sides) == 1:
        sides = sides * D
    if len(sides) != D or min(sides) < 1:
        raise UsageError(f"--sides needs {D} positive lengths")
    return sides


def _parse_window(text: Optional[str]) -> Tuple[int, int]:
    if text is None:
        return 1, 3
    try:
        parts = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --window {text!r}") from None
    if len(parts) == 1:
        parts = [parts[0], parts[0] + 2]
    if len(parts) != 2 or not 0 <= parts[0] <= parts[1]:
        raise UsageError("--window takes inner,outer radii")
    return parts[0], parts[1]


def oracle_report(code: StabilizerCode, sides: Optional[str], window: Optional[str]) -> dict:
    from .charges import charge_modules
    from .oracle import NotStabilized, ground_state_degeneracy, window_Q0
    out = {}
    sz = _parse_sides(sides, code.D)
    out["sides"] = list(sz)
    out["ground_state_degeneracy"] = ground_state_degeneracy(code, sz)
    q0 = charge_modules(code, [0])[0]
    out["Q0_order"] = q0.order
    if code.D <= 3:
        r, R = _parse_window(window)
        try:
            res = window_Q0(code, r, R)
            out["window"] = {"orders": [list(o) for o in res.orders], "order": res.order, "stabilized": True}
        except NotStabilized as exc:
            out["window"] = {"stabilized": False, "message": str(exc)}
        out["window_matches_Q0"] = out["window"].get("order") == q0.order
    return out


# ---------------------------------------------------------------------------
# text rendering


def _render_text(command: str, report: dict) -> str:
    lines = [f"{report['code']}:"]
    body = report["result"]
    if command == "analyze":
        for part in body["parts"]:
            if len(body["parts"]) > 1:
                lines.append(f"  part {part['name']} (modulus {part['modulus']})")
            inv = part["invariants"]
            lines.append(f"  saturated {inv['saturated']}, lagrangian {inv['lagrangian']}")
            lines.append(f"  Z = {_group_text(inv['Z'])}, S = {_group_text(inv['S'])}")
            for row in part["charges"]:
                lines.append(f"  Q^{row['degree']} = {_group_text(row['invariant_factors'])}")
            lines.append(f"  {part['mobility']['message']}")
    elif command == "charges":
        for row in body["charges"]:
            ann = ", ".join(row["annihilator"])
            flag = "finite" if row["mobile"] else "infinite"
            lines.append(f"  Q^{row['degree']} = {_group_text(row['invariant_factors'])}  ({flag}; Ann = ({ann}))")
    elif command == "mobility":
        lines.append(f"  {body['message']}")
    elif command == "braid":
        lines.append(f"  degrees {body['degrees'][0]}, {body['degrees'][1]}; ell = {body['ell']}")
        for s, row in zip(body["rows"], body["omega0"]):
            for t, v in zip(body["columns"], row):
                lines.append(f"  Omega0({s}, {t}) = {v}")
    elif command == "spin":
        for t, v in body["spin"].items():
            lines.append(f"  theta({t}) = {v}")
    elif command == "cocycle":
        for t, comps in body["cochains"].items():
            lines.append(f"  class {t}:")
            for c in comps:
                den = " ".join(f"t_{k}^{v}" for k, v in c["denominator"].items()) or "1"
                lines.append(f"    {c['index']}: [{', '.join(c['numerator'])}] / ({den})")
    elif command == "oracle":
        lines.append(f"  ground state degeneracy on {'x'.join(map(str, body['sides']))}: {body['ground_state_degeneracy']}")
        lines.append(f"  |Q^0| = {body['Q0_order']}")
        if "window" in body:
            w = body["window"]
            if w["stabilized"]:
                lines.append(f"  window quotient order {w['order']} (stabilized)")
            else:
                lines.append(f"  window quotient not stabilized: {w['message']}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# entry point

COMMANDS = ("analyze", "charges", "mobility", "braid", "spin", "cocycle", "oracle")


def run(command: str, code: StabilizerCode, args) -> dict:
    ell = args.ell_override
    if command == "analyze":
        result = analyze(code, ell)
    elif command == "charges":
        degrees = range(max(code.D, 1)) if args.degree is None else [args.degree]
        result = {"charges": charge_rows(code, degrees)}
    elif command == "mobility":
        result = mobility_report(code, ell)
    elif command == "braid":
        result = braid(code, args.classes, args.degree, ell)
    elif command == "spin":
        result = spin(code, args.classes, ell)
    elif command == "cocycle":
        result = cocycle(code, args.classes, args.degree, ell)
    elif command == "oracle":
        result = oracle_report(code, args.sides, args.window)
    else:
        raise UsageError(f"unknown command {command}")
    return {"schema": SCHEMA_VERSION, "command": command, "code": code.name, "result": result}


def build_parser():
    import argparse
    ap = argparse.ArgumentParser(prog="stabq", description="Invariants of translation-invariant stabilizer codes.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("code", nargs="?", help="JSON code file (bundled names are accepted)")
    ap.add_argument("--json", action="store_true", help="emit the JSON report")
    ap.add_argument("--degree", type=int, default=None)
    ap.add_argument("--classes", default=None, help="generator indices or sector signs (+ or p, - or m), e.g. 0,1 or p,m")
    ap.add_argument("--ell-override", type=int, default=None)
    ap.add_argument("--window", default=None, help="inner,outer radii for the window count")
    ap.add_argument("--sides", default=None, help="torus side lengths, e.g. 4x4")
    ap.add_argument("--batch", default=None, metavar="DIR", help="run the command on every *.json in DIR")
    return ap


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def _run_file(path: str, command: str, args) -> Tuple[int, dict]:
    from .charges import NotMobile
    try:
        code = load_code(path)
        return 0, run(command, code, args)
    except NotMobile as exc:
        return 3, {"error": str(exc), "exit": 3}
    except (ValidationError, FileNotFoundError) as exc:
        return 2, {"error": str(exc), "exit": 2}


def _batch(args) -> int:
    from concurrent.futures import ProcessPoolExecutor
    files = sorted(str(p) for p in Path(args.batch).glob("*.json"))
    if not files:
        print(f"no *.json files in {args.batch}")
        return 2
    with ProcessPoolExecutor() as pool:
        results = list(pool.map(_run_file, files, [args.command] * len(files), [args] * len(files)))
    reports = {Path(f).stem: r for f, (_, r) in zip(files, results)}
    if args.json:
        print(dumps(reports))
    else:
        for name, rep in reports.items():
            print(rep["error"] if "error" in rep else _render_text(args.command, rep))
    return max(status for status, _ in results)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.batch:
        return _batch(args)
    if args.code is None:
        print("error: a code file is required", file=sys.stderr)
        return 2
    status, report = _run_file(args.code, args.command, args)
    if status:
        print(f"error: {report['error']}", file=sys.stderr)
        return status
    print(dumps(report) if args.json else _render_text(args.command, report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
