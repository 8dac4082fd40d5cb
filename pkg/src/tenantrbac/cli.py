"""Command-line front end: validate, merge, compile, eval, fuzz, graph.

Exit codes: ``eval`` returns 0 Permit, 1 Deny, 2 NotApplicable,
3 Indeterminate and 4 for engine errors; other subcommands return 0 on
success and 1 when they report defects.  Usage errors return 64 and
unreadable inputs 66.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import replace
from pathlib import Path

from . import formats
from .compiler import SINGLE_TENANT_SCHEME, DEFAULT_SCHEME, compile
from .errors import FormatError, NamingCollisionError, PolicyParseError, RBACError
from .graph import to_dot
from .merge import merge_hierarchies
from .model import BackstopPlacement
from .oracle import Bounds, find_divergences, isolation_violations, random_instance
from .pdp import evaluate_request, parse_request
from .policy import PolicyRepository, load_documents, serialize

EX_USAGE = 64
EX_NOINPUT = 66
EX_ENGINE = 4


class UsageError(Exception):
    def __init__(self, message: str, code: int = EX_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _err(line: str) -> None:
    print(line, file=sys.stderr)


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"cannot read {path}", EX_NOINPUT)
    return p.read_text(encoding="utf-8")


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _policy_dir(path: str) -> Path:
    p = Path(path)
    if not p.is_dir():
        raise UsageError(f"{path} is not a directory", EX_NOINPUT)
    return p


def safe_file_name(policy_set_id: str) -> str:
    """File name for a compiled policy set: unsafe characters become ``_``."""
    return re.sub(r"[^A-Za-z0-9._-]", "_", policy_set_id) + ".xml"


def cmd_validate(args) -> int:
    docs, diags = load_documents(_policy_dir(args.policy_dir))
    diags = list(diags) + list(PolicyRepository.from_documents(docs).diagnostics)
    for d in diags:
        _err(str(d))
    if not diags:
        print(f"ok: {len(docs)} policy documents")
    return 1 if diags else 0


def cmd_merge(args) -> int:
    hierarchies, problems = [], []
    for path in args.files:
        try:
            hierarchies.append(formats.parse_hierarchy(_read(path), path))
        except FormatError as exc:
            problems.extend(exc.lines())
    if not problems:
        try:
            merged = merge_hierarchies(hierarchies)
        except RBACError as exc:
            problems.append(str(exc))
    for line in problems:
        _err(line)
    if problems:
        return 1
    _write(args.output, formats.format_merged(merged))
    return 0


def _scheme(args):
    scheme = SINGLE_TENANT_SCHEME if args.single_tenant_naming else DEFAULT_SCHEME
    if args.role_prefix:
        scheme = replace(scheme, role_value_prefix=args.role_prefix)
    if args.role_attribute_id:
        scheme = replace(scheme, role_attribute_id=args.role_attribute_id)
    return scheme


def cmd_compile(args) -> int:
    try:
        merged = formats.parse_merged(_read(args.merged), args.merged)
        pa = formats.parse_assignment(_read(args.assignment), merged, args.assignment)
        repo = compile(merged, pa, _scheme(args), BackstopPlacement(args.backstop))
    except FormatError as exc:
        for line in exc.lines():
            _err(line)
        return 1
    except (NamingCollisionError, RBACError) as exc:
        _err(str(exc))
        return 1
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    names = {}
    for doc in repo.documents:
        name = safe_file_name(doc.id)
        if name in names:
            _err(f"policy sets {names[name]!r} and {doc.id!r} map to file {name}")
            return 1
        names[name] = doc.id
    for doc in repo.documents:
        (out / safe_file_name(doc.id)).write_text(serialize(doc), encoding="utf-8")
    return 0


def cmd_eval(args) -> int:
    docs, diags = load_documents(_policy_dir(args.policy_dir))
    try:
        request = parse_request(_read(args.request))
    except PolicyParseError as exc:
        _err(f"{args.request}: {exc}")
        return EX_ENGINE
    repo = PolicyRepository.from_documents(docs)
    diags = list(diags) + list(repo.diagnostics)
    if diags:
        for d in diags:
            _err(str(d))
        return EX_ENGINE
    decision = evaluate_request(repo, request)
    sys.stdout.write(decision.format())
    return decision.outcome.exit_code


def cmd_fuzz(args) -> int:
    bounds = Bounds(args.tenants, args.roles, args.objects, args.modes, args.subjects,
                    exact=args.exact)
    placement = BackstopPlacement(args.backstop)
    report = []
    for seed in range(args.start, args.start + args.seeds):
        inst = random_instance(seed, bounds, tenant_scoped=args.tenant_scoped)
        report.extend(find_divergences(inst, placement=placement))
        if args.tenant_scoped:
            report.extend(isolation_violations(inst, placement=placement))
    for d in report:
        print(d)
    return 1 if report else 0


def cmd_graph(args) -> int:
    try:
        merged = formats.parse_merged(_read(args.merged), args.merged)
    except FormatError as exc:
        for line in exc.lines():
            _err(line)
        return 1
    _write(args.output, to_dot(merged))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tenantrbac", description="Multi-tenant RBAC policy engine")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a directory of policy files")
    p.add_argument("policy_dir")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("merge", help="merge tenant hierarchy files")
    p.add_argument("files", nargs="+")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("compile", help="compile a merged role set to policy files")
    p.add_argument("merged")
    p.add_argument("assignment")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--role-prefix")
    p.add_argument("--role-attribute-id")
    p.add_argument("--single-tenant-naming", action="store_true",
                   help="single-tenant identifiers such as RPS:physician:role")
    p.add_argument("--backstop", choices=[b.value for b in BackstopPlacement],
                   default=BackstopPlacement.MAXIMAL.value)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("eval", help="evaluate a request file")
    p.add_argument("policy_dir")
    p.add_argument("request")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fuzz", help="compare engine and oracle on random instances")
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--start", type=int, default=0)
    for name, default in (("tenants", 4), ("roles", 6), ("objects", 5), ("modes", 3),
                          ("subjects", 8)):
        p.add_argument(f"--{name}", type=int, default=default)
    p.add_argument("--exact", action="store_true", help="use every bound at its limit")
    p.add_argument("--tenant-scoped", action="store_true",
                   help="tenant-scoped privileges only; also checks isolation")
    p.add_argument("--backstop", choices=[b.value for b in BackstopPlacement],
                   default=BackstopPlacement.MAXIMAL.value)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("graph", help="emit the merged hierarchy as a graph")
    p.add_argument("merged")
    p.add_argument("--format", choices=["dot"], default="dot")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_graph)
    return parser


def run(argv: list[str]) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "fuzz":
            try:
                Bounds(args.tenants, args.roles, args.objects, args.modes, args.subjects)
            except RBACError as exc:
                raise UsageError(f"tenantrbac fuzz: {exc}") from None
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return exc.code


def main() -> None:
    sys.exit(run(sys.argv[1:]))
