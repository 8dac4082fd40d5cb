"""Structured-text files: tenant hierarchies, merged role sets, privilege assignments.

The grammar is documented in ``docs/formats.md``.  Readers collect every
defect with its line number before raising :class:`FormatError`; writers
are deterministic so identical inputs give byte-identical files.
"""

from __future__ import annotations

import os
import re
from pathlib import Path
from typing import Iterable, Mapping

from .errors import CycleError, FormatError, ModelError
from .merge import (
    TENANT_PLACEHOLDER,
    MergedRoleSet,
    PrivilegeTemplate,
    instantiate_privilege,
    merge_hierarchies,
)
from .model import ObjectId, ParameterizedRole, Privilege, RoleHierarchy, new_hierarchy

MERGED_HEADER = "kind: merged-role-set"

_KEY = re.compile(r"^(tenant|roles|edges)\s*:\s*(.*)$")
_EDGE = re.compile(r"^(\S+)\s*->\s*(\S+)$")
_QUALIFIED = re.compile(r"^(\S+)\s*@\s*(\S+)$")


def _lines(text: str) -> list[tuple[int, str]]:
    out = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip() if not raw.lstrip().startswith("#") else ""
        if line.strip():
            out.append((n, line))
    return out


class _Block:
    def __init__(self, tenant: str, line: int):
        self.tenant = tenant
        self.line = line
        self.roles: list[tuple[int, str]] = []
        self.edges: list[tuple[int, str, str]] = []


def _parse_blocks(text: str, qualified: bool, problems: list) -> list[_Block]:
    blocks: list[_Block] = []
    section = None
    for n, line in _lines(text):
        stripped = line.strip()
        if stripped == MERGED_HEADER:
            if not qualified or blocks:
                problems.append((n, f"unexpected {MERGED_HEADER!r}"))
            continue
        m = _KEY.match(stripped)
        if m and not line[0].isspace():
            key, rest = m.groups()
            if key == "tenant":
                if not rest:
                    problems.append((n, "tenant id missing"))
                    rest = "?"
                if blocks and not qualified:
                    problems.append((n, "a hierarchy file holds exactly one tenant"))
                blocks.append(_Block(rest, n))
                section = None
            elif not blocks:
                problems.append((n, f"'{key}:' before 'tenant:'"))
            elif rest not in ("", "[]"):
                problems.append((n, f"'{key}:' must be followed by list items"))
            else:
                section = key
            continue
        if stripped.startswith("- ") or stripped == "-":
            item = stripped[1:].strip()
            if section is None:
                problems.append((n, "list item outside 'roles:' or 'edges:'"))
            elif section == "roles":
                role = _role_item(item, blocks[-1].tenant, qualified, n, problems)
                if role:
                    blocks[-1].roles.append((n, role))
            else:
                e = _EDGE.match(item)
                if not e:
                    problems.append((n, f"edge {item!r} is not 'senior -> junior'"))
                    continue
                senior = _role_item(e.group(1).strip(), blocks[-1].tenant, False, n, problems)
                junior = _role_item(e.group(2).strip(), blocks[-1].tenant, False, n, problems)
                if senior and junior:
                    blocks[-1].edges.append((n, senior, junior))
            continue
        problems.append((n, f"cannot parse {stripped!r}"))
    if not blocks:
        problems.append((1, "no 'tenant:' found"))
    return blocks


def _role_item(item: str, tenant: str, qualified: bool, n: int, problems: list) -> str | None:
    if qualified:
        m = _QUALIFIED.match(item)
        if not m:
            problems.append((n, f"role {item!r} must be written 'roleName @ tenant'"))
            return None
        if m.group(2) != tenant:
            problems.append((n, f"role {item!r} is listed under tenant {tenant!r}"))
            return None
        item = m.group(1)
    if not item or " " in item:
        problems.append((n, f"bad role name {item!r}"))
        return None
    return item


def _build(block: _Block, problems: list) -> RoleHierarchy | None:
    before = len(problems)
    first: dict[str, int] = {}
    for n, role in block.roles:
        if role in first:
            problems.append((n, f"duplicate role {role!r} (first listed on line {first[role]})"))
        else:
            first[role] = n
    for n, senior, junior in block.edges:
        for r in (senior, junior):
            if r not in first:
                problems.append((n, f"edge names unknown role {r!r}"))
    if len(problems) > before:
        return None
    try:
        return new_hierarchy(block.tenant, list(first),
                             [(s, j) for _, s, j in block.edges])
    except CycleError as exc:
        steps = set(zip(exc.cycle, exc.cycle[1:]))
        for n, s, j in block.edges:
            if (s, j) in steps or (j, s) in steps:
                problems.append((n, f"edge {s} -> {j} is part of a seniority cycle"))
        return None
    except ModelError as exc:
        problems.append((block.line, str(exc)))
        return None


def parse_hierarchy(text: str, source: str = "<hierarchy>") -> RoleHierarchy:
    problems: list[tuple[int, str]] = []
    blocks = _parse_blocks(text, False, problems)
    h = _build(blocks[0], problems) if blocks else None
    if problems or h is None:
        raise FormatError(source, sorted(problems))
    return h


def format_hierarchy(h: RoleHierarchy, qualified: bool = False) -> str:
    def name(r):
        return f"{r} @ {h.tenant}" if qualified else r

    lines = [f"tenant: {h.tenant}", "roles:" if h.roles else "roles: []"]
    lines += [f"  - {name(r)}" for r in sorted(h.roles)]
    lines.append("edges:" if h.seniority else "edges: []")
    lines += [f"  - {s} -> {j}" for s, j in sorted(h.seniority)]
    return "\n".join(lines) + "\n"


def parse_merged(text: str, source: str = "<merged>") -> MergedRoleSet:
    problems: list[tuple[int, str]] = []
    lines = _lines(text)
    if not lines or lines[0][1].strip() != MERGED_HEADER:
        problems.append((lines[0][0] if lines else 1, f"first line must be {MERGED_HEADER!r}"))
    blocks = _parse_blocks(text, True, problems)
    seen: dict[str, int] = {}
    hierarchies = []
    for b in blocks:
        if b.tenant in seen:
            problems.append((b.line, f"tenant {b.tenant!r} repeated (first on line {seen[b.tenant]})"))
            continue
        seen[b.tenant] = b.line
        h = _build(b, problems)
        if h is not None:
            hierarchies.append(h)
    if problems:
        raise FormatError(source, sorted(problems))
    return merge_hierarchies(hierarchies)


def format_merged(merged: MergedRoleSet) -> str:
    parts = [MERGED_HEADER]
    for tenant in merged.tenants:
        parts.append(format_hierarchy(merged.hierarchies[tenant], qualified=True).rstrip("\n"))
    return "\n".join(parts) + "\n"


def parse_assignment(text: str, merged: MergedRoleSet | None = None,
                     source: str = "<assignment>") -> dict[ParameterizedRole, frozenset[Privilege]]:
    """Read ``role @ tenant:`` headers followed by ``- object mode`` items.

    Objects containing ``{tenant}`` are instantiated at the header's tenant
    and owned by it; ``- object mode @ owner`` marks any other tenant-owned
    object.  Objects without either are shared.
    """
    problems: list[tuple[int, str]] = []
    pa: dict[ParameterizedRole, set[Privilege]] = {}
    current = None
    for n, line in _lines(text):
        stripped = line.strip()
        if not line[0].isspace() and stripped.endswith(":"):
            m = _QUALIFIED.match(stripped[:-1].strip())
            if not m:
                problems.append((n, f"header {stripped!r} must be 'roleName @ tenant:'"))
                current = None
                continue
            try:
                current = ParameterizedRole(m.group(1), m.group(2))
            except ModelError as exc:
                problems.append((n, str(exc)))
                current = None
                continue
            if merged is not None and current not in merged.roles:
                problems.append((n, f"role {current} is not in the merged role set"))
            if current in pa:
                problems.append((n, f"role {current} listed twice"))
            pa.setdefault(current, set())
            continue
        if stripped.startswith("- "):
            if current is None:
                problems.append((n, "privilege listed before any role header"))
                continue
            tokens = stripped[2:].split()
            owner = None
            if len(tokens) == 4 and tokens[2] == "@":
                owner = tokens.pop()
                tokens.pop()
            if len(tokens) != 2:
                problems.append(
                    (n, f"privilege {stripped[2:]!r} must be 'object mode [@ owner]'"))
                continue
            obj, mode = tokens
            try:
                if TENANT_PLACEHOLDER in obj:
                    if owner is not None:
                        raise ModelError(f"template {obj!r} already names its owner")
                    priv = instantiate_privilege(PrivilegeTemplate(obj, mode),
                                                 current.hierarchy_id)
                else:
                    priv = Privilege(ObjectId(obj, owner), mode)
            except ModelError as exc:
                problems.append((n, str(exc)))
                continue
            pa[current].add(priv)
            continue
        problems.append((n, f"cannot parse {stripped!r}"))
    if problems:
        raise FormatError(source, sorted(problems))
    return {r: frozenset(p) for r, p in pa.items()}


def _privilege_text(p: Privilege, role: ParameterizedRole) -> str:
    owner = p.object.owning_tenant
    if owner == role.hierarchy_id and owner in p.object.value:
        pattern = p.object.value.replace(owner, TENANT_PLACEHOLDER, 1)
        if instantiate_privilege(PrivilegeTemplate(pattern, p.mode), owner) == p:
            return f"{pattern} {p.mode}"
    if owner is not None:
        return f"{p.object.value} {p.mode} @ {owner}"
    return f"{p.object.value} {p.mode}"


def format_assignment(pa: Mapping[ParameterizedRole, Iterable[Privilege]]) -> str:
    lines = []
    for role in sorted(pa, key=lambda r: (r.hierarchy_id, r.role_name)):
        lines.append(f"{role.role_name} @ {role.hierarchy_id}:")
        for p in sorted(pa[role], key=lambda p: (p.object.value, p.mode,
                                                 p.object.owning_tenant or "")):
            lines.append(f"  - {_privilege_text(p, role)}")
    return "\n".join(lines) + "\n"


def read_text(path: str | os.PathLike) -> str:
    return Path(path).read_text(encoding="utf-8")
