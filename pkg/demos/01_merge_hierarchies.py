"""Merge two tenants' role hierarchies and take one back out again.

Both tenants have a role called "physician".  After merging, each role is
tagged with its tenant, so the two stay distinct and each tenant's
hierarchy can be rebuilt exactly.
"""

from __future__ import annotations

from pathlib import Path

from tenantrbac.formats import format_merged, parse_hierarchy
from tenantrbac.graph import to_dot
from tenantrbac.merge import merge_hierarchies, reconstitute
from tenantrbac.model import dominates

DATA = Path(__file__).parent / "data"


def main() -> None:
    clinic = parse_hierarchy((DATA / "clinic.txt").read_text(), "clinic.txt")
    hospital = parse_hierarchy((DATA / "hospital.txt").read_text(), "hospital.txt")
    merged = merge_hierarchies([clinic, hospital])

    print(format_merged(merged))
    physicians = [r for r in merged.sorted_roles() if r.role_name == "physician"]
    print("roles named physician:", ", ".join(map(str, physicians)))
    print(f"{len(merged.roles)} roles = {len(clinic.roles)} + {len(hospital.roles)}")

    chief = merged.role("chief", "hospital")
    print("chief@hospital dominates physician@hospital:",
          dominates(chief, merged.role("physician", "hospital"), merged))
    print("chief@hospital dominates physician@clinic:",
          dominates(chief, merged.role("physician", "clinic"), merged))

    assert reconstitute(merged, "clinic") == clinic
    print("\nclinic hierarchy reconstituted exactly\n")
    print(to_dot(merged, "tenants"))


if __name__ == "__main__":
    main()
