"""Merging per-tenant hierarchies into one parameterized role set.

Each tenant's roles are tagged with the tenant id, so the union of all
role sets never collapses two tenants' same-named roles.  The original
hierarchies are kept alongside, which lets any single one be rebuilt from
the merged set.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import DuplicateTenantError, ModelError, UnknownRoleError, UnknownTenantError
from .model import (
    ObjectId,
    ParameterizedRole,
    Privilege,
    RoleHierarchy,
    RoleParam,
    new_hierarchy,
)

TENANT_PLACEHOLDER = "{tenant}"


@dataclass(frozen=True, eq=False)
class MergedRoleSet:
    roles: frozenset[ParameterizedRole]
    hierarchies: Mapping[str, RoleHierarchy]

    def __eq__(self, other):
        if not isinstance(other, MergedRoleSet):
            return NotImplemented
        return self.roles == other.roles and dict(self.hierarchies) == dict(other.hierarchies)

    __hash__ = None

    @property
    def tenants(self) -> tuple[str, ...]:
        return tuple(self.hierarchies)

    def role(self, role_name: str, tenant: str) -> ParameterizedRole:
        """Look up a role by name and tenant, returning the stored instance."""
        key = ParameterizedRole(role_name, tenant)
        for r in self.roles:
            if r == key:
                return r
        raise UnknownRoleError(f"role {key} is not in the merged role set")

    def roles_of(self, tenant: str) -> frozenset[ParameterizedRole]:
        if tenant not in self.hierarchies:
            raise UnknownTenantError(f"tenant {tenant!r} is not in the merged role set")
        return frozenset(r for r in self.roles if r.hierarchy_id == tenant)

    def immediate_juniors(self, role: ParameterizedRole) -> frozenset[ParameterizedRole]:
        if role not in self.roles:
            raise UnknownRoleError(f"role {role} is not in the merged role set")
        h = self.hierarchies[role.hierarchy_id]
        return frozenset(ParameterizedRole(j, role.hierarchy_id)
                         for j in h.immediate_juniors(role.role_name))

    def is_maximal(self, role: ParameterizedRole) -> bool:
        if role not in self.roles:
            raise UnknownRoleError(f"role {role} is not in the merged role set")
        return role.role_name in self.hierarchies[role.hierarchy_id].maximal_roles()

    def sorted_roles(self) -> list[ParameterizedRole]:
        order = {t: i for i, t in enumerate(self.hierarchies)}
        return sorted(self.roles, key=lambda r: (order[r.hierarchy_id], r.role_name))


def merge_hierarchies(hs: Sequence[RoleHierarchy],
                      extra_params: Mapping[tuple[str, str], Iterable[RoleParam]] | None = None,
                      ) -> MergedRoleSet:
    """Union the tenants' role sets, tagging every role with its tenant.

    ``extra_params`` optionally maps ``(tenant, role_name)`` to additional
    role parameters, which are carried but never interpreted.
    """
    extra_params = extra_params or {}
    hierarchies: dict[str, RoleHierarchy] = {}
    for h in hs:
        if h.tenant in hierarchies:
            raise DuplicateTenantError(f"tenant {h.tenant!r} appears more than once")
        hierarchies[h.tenant] = h
    for tenant, name in extra_params:
        if tenant not in hierarchies or name not in hierarchies[tenant].roles:
            raise UnknownRoleError(f"parameters given for unknown role {name}@{tenant}")
    roles = frozenset(
        ParameterizedRole(name, h.tenant, tuple(extra_params.get((h.tenant, name), ())))
        for h in hierarchies.values()
        for name in h.roles
    )
    return MergedRoleSet(roles, MappingProxyType(hierarchies))


def reconstitute(merged: MergedRoleSet, tenant: str) -> RoleHierarchy:
    """Rebuild one tenant's hierarchy from the roles tagged with its id."""
    if tenant not in merged.hierarchies:
        raise UnknownTenantError(f"tenant {tenant!r} is not in the merged role set")
    names = sorted(r.role_name for r in merged.roles
                   if r.hierarchy_id == tenant)
    return new_hierarchy(tenant, names, merged.hierarchies[tenant].seniority)


@dataclass(frozen=True)
class PrivilegeTemplate:
    """A privilege whose object may name its owning tenant via ``{tenant}``."""

    object_pattern: str
    mode: str

    def __post_init__(self):
        count = self.object_pattern.count(TENANT_PLACEHOLDER)
        if count > 1:
            raise ModelError(
                f"template {self.object_pattern!r} uses {TENANT_PLACEHOLDER} more than once")
        if not self.object_pattern or not self.mode:
            raise ModelError("template object pattern and mode must be non-empty")

    @property
    def tenant_scoped(self) -> bool:
        return TENANT_PLACEHOLDER in self.object_pattern


def instantiate_privilege(template: PrivilegeTemplate, tenant: str) -> Privilege:
    if template.tenant_scoped:
        value = template.object_pattern.replace(TENANT_PLACEHOLDER, tenant)
        return Privilege(ObjectId(value, tenant), template.mode)
    return Privilege(ObjectId(template.object_pattern), template.mode)
