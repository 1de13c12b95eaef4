"""Command-line front end.

Exit codes are disjoint by failure class:

* 0: success
* 1: I/O or parse failure (unreadable file, malformed JSON, bad shape)
* 2: validation failure (invariant violations, dangling references,
  duplicate ids, invalid taxonomy records, unknown matrix names)
* 3: incomplete assessment inputs (missing ratings or severities), with the
  offending node ids listed one per line

All configuration flows through files and flags; no environment variables
are consulted, so identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import DanglingReferenceError, DuplicateIdError, ModelFormatError
from .matrices import MatrixConfig
from .model import Model, load_model, model_from_dict, validate_model
from .report import IncompleteInputError, build_report, render_json, render_text
from .risk import Backend, EvitaRiskTables, MissingSeverityError, evita_risk_component, Controllability
from .feasibility import FeasibilityError, MissingRatingError
from .stride import STRIDE_ORDER, DfdKind
from .taxonomy import (
    RecordStore,
    StoreError,
    TaxonomyFormatError,
    record_from_dict,
    serialize_record,
    validate_record,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_INCOMPLETE = 3

MATRIX_NAMES = ("heavens-risk", "evita-risk", "window", "stride-map")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except StoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tara",
        description="Threat analysis and risk assessment over declarative models.",
    )
    subparsers = parser.add_subparsers(required=True)

    validate = subparsers.add_parser("validate", help="check a model file against all invariants")
    validate.add_argument("path", help="model file")
    validate.set_defaults(handler=_cmd_validate)

    assess = subparsers.add_parser("assess", help="run the full assessment pipeline over a model")
    assess.add_argument("path", help="model file")
    assess.add_argument("--backend", required=True, choices=[b.value for b in Backend])
    assess.add_argument("--format", default="text", choices=["text", "json"])
    assess.add_argument("--matrices", help="JSON file with matrix overrides applied on top of the model's")
    assess.set_defaults(handler=_cmd_assess)

    taxonomy = subparsers.add_parser("taxonomy", help="manage the attack-record store")
    taxonomy_sub = taxonomy.add_subparsers(required=True)

    add = taxonomy_sub.add_parser("add", help="validate a record and append it to the store")
    add.add_argument("record", help="JSON file holding one attack record")
    add.add_argument("--store", required=True, help="record store file (created when absent)")
    add.set_defaults(handler=_cmd_taxonomy_add)

    query = taxonomy_sub.add_parser("query", help="print records matching every given predicate")
    query.add_argument("--store", required=True)
    query.add_argument("--eq", action="append", default=[], metavar="FIELD=VALUE",
                       help="keep records where any level of FIELD equals VALUE")
    query.add_argument("--contains", action="append", default=[], metavar="FIELD=VALUE",
                       help="keep records where any level of FIELD contains VALUE")
    query.set_defaults(handler=_cmd_taxonomy_query)

    export = taxonomy_sub.add_parser("export", help="print the full store")
    export.add_argument("--store", required=True)
    export.set_defaults(handler=_cmd_taxonomy_export)

    matrix = subparsers.add_parser("matrix", help="inspect effective configuration tables")
    matrix_sub = matrix.add_subparsers(required=True)
    show = matrix_sub.add_parser("show", help="print one effective table")
    show.add_argument("name", help=f"one of: {', '.join(MATRIX_NAMES)}")
    show.add_argument("--matrices", help="JSON file with matrix overrides")
    show.set_defaults(handler=_cmd_matrix_show)

    return parser


def _read_text(path: str) -> str | None:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None


def _load_model_with_overrides(args) -> tuple[Model | None, int]:
    text = _read_text(args.path)
    if text is None:
        return None, EXIT_IO
    overrides = None
    if getattr(args, "matrices", None):
        override_text = _read_text(args.matrices)
        if override_text is None:
            return None, EXIT_IO
        try:
            overrides = json.loads(override_text)
        except json.JSONDecodeError as exc:
            print(f"error: {args.matrices}: line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
            return None, EXIT_IO
    try:
        if overrides is None:
            model = load_model(text)
        else:
            document = json.loads(text)
            if not isinstance(document, dict):
                raise ModelFormatError("document: expected an object")
            matrices = dict(document.get("matrices") or {})
            matrices.update(overrides)
            document["matrices"] = matrices
            model = model_from_dict(document)
    except json.JSONDecodeError as exc:
        print(f"error: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
        return None, EXIT_IO
    except ModelFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, EXIT_IO
    except (DuplicateIdError, DanglingReferenceError) as exc:
        print(exc)
        return None, EXIT_VALIDATION
    return model, EXIT_OK


def _cmd_validate(args) -> int:
    model, status = _load_model_with_overrides(args)
    if model is None:
        return status
    violations = validate_model(model)
    if violations:
        for violation in violations:
            print(violation)
        return EXIT_VALIDATION
    return EXIT_OK


def _cmd_assess(args) -> int:
    model, status = _load_model_with_overrides(args)
    if model is None:
        return status
    violations = validate_model(model)
    if violations:
        for violation in violations:
            print(violation)
        return EXIT_VALIDATION
    try:
        report = build_report(model, Backend(args.backend))
    except IncompleteInputError as exc:
        print("missing ratings or severities for:", file=sys.stderr)
        for node_id in exc.node_ids:
            print(node_id)
        return EXIT_INCOMPLETE
    except (MissingRatingError, MissingSeverityError) as exc:
        print(exc.node_id)
        return EXIT_INCOMPLETE
    except FeasibilityError as exc:
        # e.g. one tree mixing the potential-profile approach with the
        # proximity shortcut; a modeling inconsistency, not missing data
        print(exc)
        return EXIT_VALIDATION
    rendered = render_json(report) if args.format == "json" else render_text(report)
    sys.stdout.write(rendered)
    return EXIT_OK


def _cmd_taxonomy_add(args) -> int:
    text = _read_text(args.record)
    if text is None:
        return EXIT_IO
    try:
        data = json.loads(text)
        if not isinstance(data, dict):
            raise TaxonomyFormatError("record document must hold a JSON object")
        record = record_from_dict(data)
    except json.JSONDecodeError as exc:
        print(f"error: {args.record}: line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_IO
    except TaxonomyFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    violations = validate_record(record)
    if violations:
        for violation in violations:
            print(violation)
        return EXIT_VALIDATION
    RecordStore(args.store).append(record)
    return EXIT_OK


def _parse_predicates(pairs: list[str]) -> dict[str, str] | None:
    predicates = {}
    for pair in pairs:
        if "=" not in pair:
            print(f"error: predicate {pair!r} must look like FIELD=VALUE", file=sys.stderr)
            return None
        name, value = pair.split("=", 1)
        predicates[name] = value
    return predicates


def _cmd_taxonomy_query(args) -> int:
    equals = _parse_predicates(args.eq)
    contains = _parse_predicates(args.contains)
    if equals is None or contains is None:
        return EXIT_VALIDATION
    try:
        matches = RecordStore(args.store).query(equals=equals, contains=contains)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_VALIDATION
    for record in matches:
        print(serialize_record(record))
    return EXIT_OK


def _cmd_taxonomy_export(args) -> int:
    for record in RecordStore(args.store).records():
        print(serialize_record(record))
    return EXIT_OK


def _cmd_matrix_show(args) -> int:
    if args.name not in MATRIX_NAMES:
        print(f"error: unknown matrix {args.name!r}; expected one of {', '.join(MATRIX_NAMES)}", file=sys.stderr)
        return EXIT_VALIDATION
    config = MatrixConfig()
    if args.matrices:
        text = _read_text(args.matrices)
        if text is None:
            return EXIT_IO
        try:
            config = MatrixConfig.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            print(f"error: {args.matrices}: line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
            return EXIT_IO
        except ModelFormatError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    sys.stdout.write(_format_matrix(args.name, config))
    return EXIT_OK


def _grid(title: str, row_labels: list[str], col_labels: list[str], cells) -> str:
    label_width = max(len(label) for label in row_labels)
    col_widths = [max(len(col_labels[j]), *(len(str(cells[i][j])) for i in range(len(row_labels))))
                  for j in range(len(col_labels))]
    lines = [title]
    lines.append(" " * label_width + "  " + "  ".join(
        col_labels[j].rjust(col_widths[j]) for j in range(len(col_labels))))
    for i, label in enumerate(row_labels):
        lines.append(label.ljust(label_width) + "  " + "  ".join(
            str(cells[i][j]).rjust(col_widths[j]) for j in range(len(col_labels))))
    return "\n".join(lines) + "\n"


def _format_matrix(name: str, config: MatrixConfig) -> str:
    from .feasibility import AccessMeans, Exposure, FeasibilityClass
    from .impact import ImpactClass

    if name == "heavens-risk":
        return _grid(
            "HEAVENS risk matrix (impact class x attack feasibility class)",
            [c.value for c in ImpactClass],
            [c.value for c in FeasibilityClass],
            config.heavens_risk,
        )
    if name == "window":
        return _grid(
            "HEAVENS window-of-opportunity matrix (access means x exposure)",
            [m.value for m in AccessMeans],
            [e.value for e in Exposure],
            config.window,
        )
    if name == "stride-map":
        lines = ["STRIDE categories applicable per DFD element kind"]
        for kind in DfdKind:
            if kind is DfdKind.TRUST_BOUNDARY:
                continue
            categories = config.stride_per_element.get(kind, frozenset())
            ordered = [c.value for c in STRIDE_ORDER if c in categories]
            lines.append(f"{kind.value}: {', '.join(ordered)}")
        return "\n".join(lines) + "\n"
    # evita-risk: the effective tables, whether closed form or overridden
    tables = config.evita_risk or EvitaRiskTables()
    ratings = [str(a) for a in range(1, 6)]
    severities = [f"S={s}" for s in range(1, 5)]
    nonsafety = [
        [
            tables.nonsafety[s - 1][a - 1]
            if tables.nonsafety is not None
            else str(evita_risk_component(s, a))
            for a in range(1, 6)
        ]
        for s in range(1, 5)
    ]
    out = _grid(
        "EVITA risk levels, non-safety categories (severity x feasibility rating; S=0 is R0)",
        severities,
        ratings,
        nonsafety,
    )
    for controllability in Controllability:
        cells = [
            [
                tables.safety[s - 1][a - 1][controllability.index - 1]
                if tables.safety is not None
                else str(evita_risk_component(s, a, controllability))
                for a in range(1, 6)
            ]
            for s in range(1, 5)
        ]
        out += "\n" + _grid(
            f"EVITA risk levels, safety category at {controllability.value}",
            severities,
            ratings,
            cells,
        )
    return out


if __name__ == "__main__":
    sys.exit(main())
