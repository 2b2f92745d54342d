"""Batch command line: ``modalctx check|normalize|translate|erase [options] FILES...``.

Exit status is 0 when every declaration succeeds, 1 when some declaration
fails (the first failing one is named on stderr) and 2 on usage or parse
errors.  Colour is used on terminals unless ``NO_COLOR`` is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from modalctx.circ import CircError, circ_synth
from modalctx.extraction import ExtractionError, GenState, extract_judgment
from modalctx.parser import Declaration, ParseError, SourceFile, parse_file
from modalctx.printer import format_ctx, format_stack, format_term, format_type
from modalctx.reduce import FuelExhausted, normalize
from modalctx.stlc import ErasureError, erase_judgment
from modalctx.syntax import alpha_equal, free_context_vars
from modalctx.typecheck import ModalVariant, TypeCheckError, synth

COMMANDS = ("check", "normalize", "translate", "erase")


@dataclass
class Report:
    name: str
    calculus: str
    status: str  # ok | error | skipped
    type: str | None = None
    extra: dict = field(default_factory=dict)
    error: dict | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "calculus": self.calculus, "status": self.status}
        if self.type is not None:
            out["type"] = self.type
        out.update(self.extra)
        if self.error is not None:
            out["error"] = self.error
        return out


class DeclarationFailure(Exception):
    def __init__(self, kind: str, message: str, detail: dict | None = None):
        self.kind = kind
        self.detail = detail or {"kind": kind, "message": message}
        super().__init__(message)


def _expect(d: Declaration, got, equal) -> None:
    if d.ty is not None and not equal(got, d.ty):
        raise DeclarationFailure("TypeMismatch",
                                 f"synthesized {format_type(got)}, declared {format_type(d.ty)}")


def _box_type(d: Declaration, variant: ModalVariant | None):
    got = synth(variant or d.variant, d.stack, d.term)
    _expect(d, got, alpha_equal)
    return got


def _circ_type(d: Declaration):
    got, annotated = circ_synth(d.stack, d.future, d.term)
    _expect(d, got, lambda a, b: a == b)
    return got, annotated


def translated_declaration(name: str, report) -> str:
    """A re-checkable ``forallbox k`` declaration for an extraction result."""
    cvars = sorted(free_context_vars(report.stack) | free_context_vars(report.term)
                   | free_context_vars(report.ty))
    head = f"forallbox k {name}"
    if cvars:
        head += f" cvars ({', '.join(cvars)})"
    return (f"{head} stack {format_stack(report.stack)}\n"
            f"  = {format_term(report.term)}\n  : {format_type(report.ty)};")


def run_declaration(command: str, d: Declaration, variant: ModalVariant | None,
                    fuel: int) -> Report:
    rep = Report(d.name, d.calculus, "ok")
    try:
        if d.calculus == "circ":
            ty, _ = _circ_type(d)
            rep.type = format_type(ty)
            if command == "translate":
                out = extract_judgment(d.stack, d.future, d.term, GenState())
                check_ty = synth(ModalVariant.K, out.stack, out.term)
                if not alpha_equal(check_ty, out.ty):
                    raise DeclarationFailure("TypeMismatch", "translated judgment does not check")
                rep.extra["translation"] = out.to_json()
                rep.extra["declaration"] = translated_declaration(d.name, out)
            elif command in ("normalize", "erase"):
                rep.status = "skipped"
        else:
            ty = _box_type(d, variant)
            rep.type = format_type(ty)
            if command == "normalize":
                rep.extra["normal_form"] = format_term(normalize(d.term, fuel))
            elif command == "erase":
                ctx, term, ety = erase_judgment(d.stack, d.term, ty)
                rep.extra["erasure"] = {"context": format_ctx(ctx), "term": format_term(term),
                                        "type": format_type(ety)}
            elif command == "translate":
                rep.status = "skipped"
    except DeclarationFailure as exc:
        rep.status, rep.error = "error", exc.detail
    except (TypeCheckError, CircError, ExtractionError) as exc:
        rep.status, rep.error = "error", exc.to_json()
    except (ErasureError, FuelExhausted) as exc:
        rep.status = "error"
        rep.error = {"kind": getattr(exc, "kind", type(exc).__name__), "message": str(exc)}
    return rep


def _color(code: str, text: str, enabled: bool) -> str:
    return f"\033[{code}m{text}\033[0m" if enabled else text


def render(rep: Report, color: bool) -> str:
    tag = {"ok": _color("32", "ok  ", color), "error": _color("31", "FAIL", color),
           "skipped": _color("33", "skip", color)}[rep.status]
    line = f"{tag} {rep.name}"
    if rep.type is not None:
        line += f" : {rep.type}"
    lines = [line]
    if rep.error is not None:
        lines.append(f"     {rep.error['kind']}: {rep.error['message']}")
        if rep.error.get("stack"):
            lines.append(f"     stack: {rep.error['stack']}")
        if rep.error.get("path"):
            lines.append(f"     at: {'/'.join(rep.error['path'])}")
    if "normal_form" in rep.extra:
        lines.append(f"     normal form: {rep.extra['normal_form']}")
    if "erasure" in rep.extra:
        e = rep.extra["erasure"]
        lines.append(f"     erased: {e['context']} |- {e['term']} : {e['type']}")
    if "declaration" in rep.extra:
        lines.append(rep.extra["declaration"])
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modalctx", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("files", nargs="+", metavar="FILE")
    p.add_argument("--variant", choices=[v.value for v in ModalVariant],
                   help="override the modal variant of every box declaration")
    p.add_argument("--fuel", type=int, default=100_000, help="step bound for normalize")
    p.add_argument("--json", action="store_true", help="emit one JSON report per file")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.fuel <= 0:
        print("modalctx: --fuel must be positive", file=sys.stderr)
        return 2
    variant = ModalVariant.parse(args.variant) if args.variant else None
    color = sys.stdout.isatty() and "NO_COLOR" not in os.environ

    sources: list[tuple[str, SourceFile]] = []
    for path in args.files:
        try:
            with open(path, encoding="utf-8") as fh:
                sources.append((path, parse_file(fh.read())))
        except OSError as exc:
            print(f"modalctx: {exc}", file=sys.stderr)
            return 2
        except ParseError as exc:
            print(f"modalctx: {path}:{exc}", file=sys.stderr)
            return 2

    first_failure = None
    documents = []
    for path, src in sources:
        reports = [run_declaration(args.command, d, variant, args.fuel) for d in src.decls]
        for rep in reports:
            if rep.status == "error" and first_failure is None:
                first_failure = f"{path}: {rep.name}"
        if args.json:
            documents.append({"file": path, "command": args.command,
                              "declarations": [r.to_json() for r in reports]})
        else:
            print(f"== {path}")
            for rep in reports:
                print(render(rep, color))
    if args.json:
        print(json.dumps(documents if len(documents) != 1 else documents[0], indent=2))
    if first_failure is not None:
        print(f"modalctx: first failing declaration: {first_failure}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
