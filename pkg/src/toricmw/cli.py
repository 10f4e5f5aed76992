"""Command-line driver: fan files in, text or JSON reports out.

Exit codes: 0 success, 1 validation failure, 2 input or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import cellular, selftest
from .fan import BUILTINS, Fan, builtin, make_fan, row_sets, validate
from .simplicial import face_label, find_shelling, is_shelling, members

EXIT_OK, EXIT_INVALID, EXIT_INPUT = 0, 1, 2

VERBS = ("validate", "shelling", "rows", "complex", "homology", "motive", "chow", "surface", "builtin", "selftest")


class ParseError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _int(value, field: str, low: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(field, f"expected an integer, got {value!r}")
    if low is not None and value < low:
        raise ParseError(field, f"expected an integer >= {low}, got {value}")
    return value


def _list(value, field: str) -> list:
    if not isinstance(value, list):
        raise ParseError(field, f"expected a list, got {type(value).__name__}")
    return value


def parse_fan(document) -> Fan:
    """Fan from a decoded fan document (1-based vertices and facet indices)."""
    if not isinstance(document, dict):
        raise ParseError("document", "expected a JSON object")
    for key in ("m", "n", "facets", "lambda"):
        if key not in document:
            raise ParseError(key, "missing field")
    unknown = set(document) - {"m", "n", "facets", "lambda", "order", "name"}
    if unknown:
        raise ParseError(sorted(unknown)[0], "unknown field")
    m = _int(document["m"], "m", 1)
    n = _int(document["n"], "n", 0)
    facets = []
    for k, f in enumerate(_list(document["facets"], "facets")):
        verts = [_int(v, f"facets[{k}]") for v in _list(f, f"facets[{k}]")]
        bad = [v for v in verts if not 1 <= v <= m]
        if bad:
            raise ParseError(f"facets[{k}]", f"vertex {bad[0]} outside 1..{m}")
        if len(set(verts)) != len(verts):
            raise ParseError(f"facets[{k}]", "repeated vertex")
        facets.append([v - 1 for v in verts])
    rows = _list(document["lambda"], "lambda")
    if len(rows) != n:
        raise ParseError("lambda", f"expected {n} rows, got {len(rows)}")
    lam = []
    for i, row in enumerate(rows):
        row = _list(row, "lambda")
        if len(row) != m:
            raise ParseError("lambda", f"row {i + 1} has {len(row)} columns, expected m = {m}")
        lam.append([_int(x, "lambda") for x in row])
    order = document.get("order")
    if order is not None:
        order = [_int(k, "order") for k in _list(order, "order")]
        if sorted(order) != list(range(1, len(facets) + 1)):
            raise ParseError("order", f"expected a permutation of 1..{len(facets)}")
        order = [k - 1 for k in order]
    name = document.get("name", "")
    if not isinstance(name, str):
        raise ParseError("name", "expected a string")
    try:
        return make_fan(m, facets, lam, order=order, name=name)
    except ValueError as exc:
        raise ParseError("facets", str(exc)) from None


def render_fan(fan: Fan) -> dict:
    """Fan document with facets listed in the fan's order."""
    doc = {
        "m": fan.m,
        "n": fan.n,
        "facets": [[v + 1 for v in members(f)] for f in fan.order],
        "lambda": fan.lam.to_rows(),
    }
    if fan.name:
        doc["name"] = fan.name
    return doc


def _labels(faces) -> list:
    return [face_label(f) for f in faces]


def shelling_section(fan: Fan) -> dict:
    data = fan.restriction
    pure = fan.K.is_pure
    found = find_shelling(fan.K) if pure else None
    return {
        "order": _labels(fan.order),
        "pure": pure,
        "is_shelling": is_shelling(fan.K, fan.order) if pure else False,
        "found": _labels(found) if found else None,
        "regular": data.is_regular,
        "restriction": [
            {"facet": face_label(f), "min": _labels(data.min_sets[k]), "r": face_label(data.restriction[k])}
            for k, f in enumerate(fan.order)
        ],
    }


def rows_section(fan: Fan) -> dict:
    table = row_sets(fan)
    return {
        "rows": [{"kappa": format(k, f"0{fan.n}b")[::-1] if fan.n else "", "omega": face_label(w)}
                 for k, w in enumerate(table.rows)],
        "facets": [
            {"facet": face_label(f), "r": face_label(fan.restriction.restriction[k]),
             "omega": sorted({face_label(table.rows[i]) for i in table.assignment[k]})}
            for k, f in enumerate(fan.order)
        ],
    }


def choose_pathway(fan: Fan, pathway: str) -> str:
    if pathway != "auto":
        return pathway
    return "lambda" if fan.K.is_pure and is_shelling(fan.K, fan.order) else "canonical"


def build_complex(fan: Fan, pathway: str) -> cellular.MWChainComplex:
    if pathway == "lambda":
        return cellular.lambda_complex(fan)
    return cellular.canonical_complex(fan)


def complex_section(cx: cellular.MWChainComplex, pathway: str) -> dict:
    out = {"pathway": pathway}
    out.update(cellular.minimal_complex(cx).as_dict())
    out["square_zero"] = cx.square_is_zero()
    return out


def chow_sections(fan: Fan, pathway: str) -> dict:
    out = {"chow": cellular.chow_basis(fan).as_dict(), "chow_witt": None}
    try:
        dec = cellular.decompose(build_complex(fan, pathway))
        out["chow_witt"] = {str(q): g for q, g in cellular.chow_witt(dec).items()}
    except ValueError as exc:
        out["chow_witt"] = {"unavailable": str(exc)}
    return out


def report(fan: Fan, verb: str, pathway: str = "auto") -> dict:
    """The JSON report for one verb; raises nothing for valid smooth fans."""
    out = {"fan": fan.name or None, "validation": validate(fan).as_dict()}
    if verb == "validate":
        return out
    if verb == "shelling":
        out["shelling"] = shelling_section(fan)
        return out
    if verb == "rows":
        out["row_sets"] = rows_section(fan)
        return out
    if verb == "chow":
        out.update(chow_sections(fan, choose_pathway(fan, pathway)))
        return out
    if verb == "surface":
        out.update(cellular.surface_report(fan))
        return out
    path = choose_pathway(fan, pathway)
    out["shelling"] = shelling_section(fan)
    cx = build_complex(fan, path)
    out["complex"] = complex_section(cx, path)
    if verb == "complex":
        return out
    try:
        dec = cellular.decompose(cx)
    except ValueError as exc:
        out["decomposition"] = {"unavailable": str(exc)}
        return out
    out["decomposition"] = dec.as_dict()
    if verb == "homology":
        out["homology"] = cellular.homology_sheaves(dec).as_dict()
    elif verb == "motive":
        out["motives"] = cellular.motive_reports(dec, cx).as_dict()
    return out


def render_text(value, indent: int = 0) -> list:
    """Indented key: value lines covering every field of a JSON value."""
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines += render_text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)) and v:
                sub = render_text(v, indent + 1)
                lines.append(f"{pad}- " + sub[0].lstrip())
                lines += sub[1:]
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(value))
    return lines


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return "{}" if isinstance(v, dict) else "[]"
    return str(v)


def emit(doc, fmt: str, stream) -> None:
    if fmt == "json":
        stream.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        stream.write("\n".join(render_text(doc)) + "\n")


def load_document(source: str, stdin=None):
    try:
        if source == "-":
            text = (stdin or sys.stdin).read()
        else:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise ParseError("input", f"cannot read {source}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("input", f"invalid JSON: {exc}") from None


def _builtin_params(params: Sequence[str]) -> list:
    out = []
    for p in params:
        try:
            out.append(json.loads(p))
        except json.JSONDecodeError:
            raise ParseError("params", f"cannot parse parameter {p!r}") from None
    return out


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toricmw", description="A1-cellular homology of smooth toric varieties")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS[:8]:
        p = sub.add_parser(verb)
        p.add_argument("input", help="fan file, or - for stdin")
        if verb in ("complex", "homology", "motive", "chow"):
            p.add_argument("--pathway", choices=("auto", "lambda", "canonical"), default="auto")
    p = sub.add_parser("builtin", help="print a builtin fan document")
    p.add_argument("name", choices=sorted(BUILTINS))
    p.add_argument("params", nargs="*", help="JSON-encoded parameters, e.g. 2 or '[[1,0],[0,1],[-1,-1]]'")
    p = sub.add_parser("selftest")
    p.add_argument("--empty-corpus", action="store_true", help="skip golden cases and the oracle")
    p.add_argument("--oracle", type=int, default=500, help="number of random oracle cases")
    return parser


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None, stdin=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    fmt = getattr(args, "format", "text")

    if args.verb == "selftest":
        empty = args.empty_corpus
        ok = selftest.run(corpus=not empty, oracle=0 if empty else args.oracle,
                          out=lambda line: stdout.write(line + "\n"))
        return EXIT_OK if ok else EXIT_INVALID

    try:
        if args.verb == "builtin":
            fan = builtin(args.name, *_builtin_params(args.params))
            stdout.write(json.dumps(render_fan(fan), ensure_ascii=False) + "\n")
            return EXIT_OK
        fan = parse_fan(load_document(args.input, stdin))
    except (ParseError, TypeError, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT

    check = validate(fan)
    if args.verb == "validate":
        emit(report(fan, "validate"), fmt, stdout)
        return EXIT_OK if check.ok else EXIT_INVALID
    if not check.ok:
        emit({"fan": fan.name or None, "validation": check.as_dict()}, fmt, stdout)
        stderr.write("error: fan is not smooth with surjective lambda\n")
        return EXIT_INVALID
    try:
        doc = report(fan, args.verb, getattr(args, "pathway", "auto"))
    except ValueError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    emit(doc, fmt, stdout)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
