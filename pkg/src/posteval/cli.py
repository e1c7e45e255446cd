"""Command-line entry point.

Every command reads and writes a project file. The PROJECT argument is either
a filesystem path (anything containing a path separator or ending in .json) or
a bare project id resolved inside the data directory, which defaults to the
POSTEVAL_DATA_DIR environment variable or the current directory.

On failure a single JSON object describing the error is printed to stderr and
the exit code is nonzero; stdout carries only the requested payload, so two
runs over the same project file produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .demo import DEMO_SEED, demo_project
from .errors import PostevalError
from .model import Project, ScoringConfig, validate_annotation
from .protocol import builtin_tree_text, load_tree
from .reports import REPORT_FORMATS, REPORT_KINDS, build_report, render
from .sheets import export_sheet, import_corpus, import_sheet
from .store import load_project, save_project

DATA_DIR_ENV = "POSTEVAL_DATA_DIR"


def _data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, "."))


def _project_path(arg: str) -> Path:
    if os.sep in arg or arg.endswith(".json"):
        return Path(arg)
    return _data_dir() / f"{arg}.json"


def _open_input(arg: str | None):
    if arg is None or arg == "-":
        return sys.stdin.buffer
    return open(arg, "rb")


def _emit_error(payload: dict) -> int:
    print(json.dumps(payload, ensure_ascii=False), file=sys.stderr)
    return 1


def _rejected_payload(result) -> dict:
    return {
        "error": "RowsRejected",
        "detail": f"{len(result.rejected)} of {result.total_rows} rows rejected",
        "rows": [{"row": r.row, "error": r.error, "detail": r.detail} for r in result.rejected],
    }


def _print_warnings(warnings) -> None:
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)


# -- commands -----------------------------------------------------------------

def cmd_init(args) -> int:
    path = _project_path(args.project)
    if path.exists() and not args.force:
        return _emit_error({
            "error": "DuplicateProject",
            "detail": f"{path} already exists (use --force to overwrite)",
        })
    if args.demo:
        project = demo_project(seed=args.seed)
        if args.name:
            project.name = args.name
    else:
        project = Project(name=args.name or path.stem)
    project.config = ScoringConfig(
        adp_weight=Fraction(args.adp_weight),
        minor_upper=Fraction(args.minor_upper),
        min_project_size=args.min_project_size,
    )
    save_project(project, path)
    print(f"initialized {path}: {len(project.segments)} segments, "
          f"{len(project.system_ids())} systems, {len(project.annotations)} annotations")
    return 0


def cmd_import_corpus(args) -> int:
    path = _project_path(args.project)
    project = load_project(path)
    with _open_input(args.input) as stream:
        result = import_corpus(stream, args.system, project, dry_run=args.dry_run)
    _print_warnings(result.warnings)
    if not args.dry_run:
        save_project(project, path)
    print(f"imported {len(result.new_outputs)} outputs for system {args.system} "
          f"({len(result.new_segments)} new segments)")
    if result.rejected:
        return _emit_error(_rejected_payload(result))
    return 0


def cmd_import_sheet(args) -> int:
    path = _project_path(args.project)
    project = load_project(path)
    with _open_input(args.input) as stream:
        result = import_sheet(stream, args.system, args.annotator, project, dry_run=args.dry_run)
    _print_warnings(result.warnings)
    if not args.dry_run:
        save_project(project, path)
    print(f"imported {len(result.annotations)} annotations by {args.annotator} "
          f"for system {args.system} ({len(result.new_segments)} new segments)")
    if result.rejected:
        return _emit_error(_rejected_payload(result))
    return 0


def cmd_export_sheet(args) -> int:
    project = load_project(_project_path(args.project))
    delimiter = "\t" if args.delimiter == "tab" else ","
    text = export_sheet(project, args.system, args.annotator, delimiter=delimiter)
    if args.output and args.output != "-":
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    path = _project_path(args.project)
    project = load_project(path)

    if args.sheet is not None:
        # Dry-run a sheet against the project; rejected rows fail the command.
        with _open_input(args.sheet) as stream:
            result = import_sheet(stream, args.system, args.annotator, project, dry_run=True)
        _print_warnings(result.warnings)
        if result.rejected:
            return _emit_error(_rejected_payload(result))
        print(f"ok: sheet has {len(result.annotations)} importable rows")
        return 0

    problems = []
    for ann in project.annotations:
        for violation in validate_annotation(ann, project):
            problems.append({
                "annotator": ann.annotator_id,
                "segment": ann.segment_id,
                "system": ann.system_id,
                "revision": ann.revision,
                "rule": violation.rule,
                "detail": violation.message,
            })
    if len(project.segments) < project.config.min_project_size:
        print(f"warning: project has {len(project.segments)} segments; "
              f"the advisory minimum is {project.config.min_project_size}", file=sys.stderr)
    if problems:
        return _emit_error({
            "error": "ValidationFailed",
            "detail": f"{len(problems)} rule violations",
            "violations": problems,
        })
    print(f"ok: {len(project.segments)} segments, {len(project.outputs)} outputs, "
          f"{len(project.annotations)} annotations")
    return 0


def cmd_report(args) -> int:
    project = load_project(_project_path(args.project))
    report = build_report(args.kind, project, project.config)
    sys.stdout.write(render(report, args.format))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(args.data_dir or _data_dir()), host=args.host, port=args.port)
    return 0


def cmd_tree_check(args) -> int:
    if args.tree is None:
        tree = load_tree(builtin_tree_text())
        label = "built-in tree"
    else:
        tree = load_tree(Path(args.tree))
        label = args.tree
    print(f"ok: {label} is valid ({len(tree.nodes)} nodes, root {tree.root!r}, "
          f"version {tree.version!r})")
    return 0


# -- parser -------------------------------------------------------------------

def _add_project_arg(parser) -> None:
    parser.add_argument("project", help="project file path or bare project id")


def _add_format_arg(parser) -> None:
    parser.add_argument("--format", choices=REPORT_FORMATS, default="text",
                        help="output rendering (default: text)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posteval",
        description="Post-editing evaluation of dialectal-Arabic-to-MSA translation: "
                    "guided annotation, error scoring, agreement, and reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a new project file")
    _add_project_arg(p)
    p.add_argument("--name", help="project name (default: file stem)")
    p.add_argument("--demo", action="store_true",
                   help="seed with the bundled synthetic demo corpus and annotations")
    p.add_argument("--seed", type=int, default=DEMO_SEED, help="demo generator seed")
    p.add_argument("--adp-weight", default="1/2", help="ADP weight as a fraction (default 1/2)")
    p.add_argument("--minor-upper", default="1", help="upper bound of the Minor bucket")
    p.add_argument("--min-project-size", type=int, default=200,
                   help="advisory minimum segment count checked by validate")
    p.add_argument("--force", action="store_true", help="overwrite an existing file")
    p.set_defaults(handler=cmd_init)

    p = sub.add_parser("import-corpus", help="add segments and one system's outputs (DA,GOLD,MT)")
    _add_project_arg(p)
    p.add_argument("--system", required=True, help="system id the MT column belongs to")
    p.add_argument("--input", help="sheet file ('-' or omitted: stdin)")
    p.add_argument("--dry-run", action="store_true", help="parse and report without writing")
    p.set_defaults(handler=cmd_import_corpus)

    p = sub.add_parser("import-sheet", help="add one annotator's filled sheet for one system")
    _add_project_arg(p)
    p.add_argument("--system", required=True)
    p.add_argument("--annotator", required=True)
    p.add_argument("--input", help="sheet file ('-' or omitted: stdin)")
    p.add_argument("--dry-run", action="store_true", help="parse and report without writing")
    p.set_defaults(handler=cmd_import_sheet)

    p = sub.add_parser("export-sheet", help="write one annotator's sheet for one system")
    _add_project_arg(p)
    p.add_argument("--system", required=True)
    p.add_argument("--annotator", required=True)
    p.add_argument("--output", help="destination file ('-' or omitted: stdout)")
    p.add_argument("--delimiter", choices=("tab", "comma"), default="tab")
    p.set_defaults(handler=cmd_export_sheet)

    p = sub.add_parser("validate", help="check project rules, or dry-run a sheet against it")
    _add_project_arg(p)
    p.add_argument("--sheet", help="sheet file to check instead of the stored annotations")
    p.add_argument("--system", help="system id for --sheet")
    p.add_argument("--annotator", help="annotator id for --sheet")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("score", help="segment scores report (alias of report --kind scores)")
    _add_project_arg(p)
    _add_format_arg(p)
    p.set_defaults(handler=cmd_report, kind="scores")

    p = sub.add_parser("agreement", help="agreement report (alias of report --kind agreement)")
    _add_project_arg(p)
    _add_format_arg(p)
    p.set_defaults(handler=cmd_report, kind="agreement")

    p = sub.add_parser("report", help="render one report kind")
    _add_project_arg(p)
    p.add_argument("--kind", choices=REPORT_KINDS, required=True)
    _add_format_arg(p)
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--data-dir", help=f"project directory (default: ${DATA_DIR_ENV} or .)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.set_defaults(handler=cmd_serve)

    p = sub.add_parser("tree-check", help="validate a decision-tree file")
    p.add_argument("tree", nargs="?", help="tree JSON file (omitted: the built-in tree)")
    p.set_defaults(handler=cmd_tree_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate" and args.sheet is not None:
        if not (args.system and args.annotator):
            return _emit_error({
                "error": "UsageError",
                "detail": "--sheet requires --system and --annotator",
            })
    try:
        return args.handler(args)
    except FileNotFoundError as exc:
        return _emit_error({"error": "FileNotFound", "detail": str(exc)})
    except PostevalError as exc:
        return _emit_error(exc.payload())


if __name__ == "__main__":
    sys.exit(main())
