"""Compile two tenants to layered policies and show inheritance and isolation.

A subject presents only the roles it holds.  Privileges of junior roles are
reached through references between permission policy sets, and objects of
one tenant stay out of reach for the other tenant's roles even when the
role names coincide.
"""

from __future__ import annotations

from pathlib import Path

from tenantrbac.compiler import compile
from tenantrbac.formats import parse_assignment, parse_hierarchy
from tenantrbac.merge import merge_hierarchies
from tenantrbac.pdp import RequestContext, enable_roles, evaluate_request
from tenantrbac.policy import serialize

DATA = Path(__file__).parent / "data"


def main() -> None:
    merged = merge_hierarchies([parse_hierarchy((DATA / f).read_text(), f)
                                for f in ("clinic.txt", "hospital.txt")])
    pa = parse_assignment((DATA / "privileges.txt").read_text(), merged, "privileges.txt")
    repo = compile(merged, pa)
    print(f"{len(repo.documents)} policy sets, roots: {', '.join(repo.roots)}\n")
    print(serialize(repo.index["PPS:clinic:physician:role"]))

    assignments = {
        "dana": {merged.role("physician", "clinic")},
        "lee": {merged.role("chief", "hospital")},
        "sam": {merged.role("receptionist", "clinic")},
    }
    cases = [
        ("dana", "clinic/chart", "read"),          # inherited from nurse
        ("dana", "clinic/prescription", "create"),
        ("dana", "hospital/prescription", "create"),   # other tenant
        ("lee", "hospital/prescription", "read"),  # inherited from pharmacist
        ("lee", "clinic/chart", "read"),
        ("sam", "clinic/chart", "read"),
    ]
    for subject, resource, action in cases:
        roles = enable_roles(subject, assignments)
        outcome = evaluate_request(repo, RequestContext.build(resource, action, roles)).outcome
        print(f"{subject:5} {action:7} {resource:24} -> {outcome}")


if __name__ == "__main__":
    main()
