"""Graphviz DOT export of a merged role set, one cluster per tenant.

Render with e.g. ``dot -Tpng roles.gv -o roles.png``.  Edges point from
senior to junior role.
"""

from __future__ import annotations

import json

from .merge import MergedRoleSet


def _q(text: str) -> str:
    return json.dumps(text)


def to_dot(merged: MergedRoleSet, name: str = "roles") -> str:
    lines = [f"digraph {_q(name)} {{", "  rankdir=TB;", "  node [shape=box];"]
    for tenant in merged.tenants:
        h = merged.hierarchies[tenant]
        lines.append(f"  subgraph {_q('cluster_' + tenant)} {{")
        lines.append(f"    label={_q(tenant)};")
        for role in sorted(h.roles):
            lines.append(f"    {_q(tenant + ':' + role)} [label={_q(role)}];")
        for senior, junior in sorted(h.seniority):
            lines.append(f"    {_q(tenant + ':' + senior)} -> {_q(tenant + ':' + junior)};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
