"""Core RBAC domain model.

Roles live in per-tenant hierarchies (directed acyclic seniority graphs).
A role in the merged, multi-tenant role set is a :class:`ParameterizedRole`
whose identity is the pair ``(role_name, hierarchy_id)``; seniors inherit
the privileges of every role they dominate.
"""

from __future__ import annotations

import enum
import graphlib
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Collection, Iterable, Mapping

from .errors import (
    CycleError,
    DuplicateRoleError,
    ModelError,
    UnknownRoleError,
    UnknownSubjectError,
)

if TYPE_CHECKING:
    from .merge import MergedRoleSet

#: Name of the role parameter carrying the owning hierarchy's identifier.
HIERARCHY_PARAM = "hierarchy"

#: Separator reserved for compiled policy identifiers.
RESERVED_SEPARATOR = ":"
_FORBIDDEN = re.compile(r"[\s:]")


class BackstopPlacement(enum.Enum):
    """Where the compiler places the trailing empty-target Deny rule.

    The oracle derives its Deny/NotApplicable boundary from the same value,
    so the two can never drift apart.
    """

    MAXIMAL = "maximal"
    EVERY_ROLE = "every"


#: Placement used by :func:`tenantrbac.compiler.compile` and
#: :func:`tenantrbac.oracle.oracle_decide` unless told otherwise.
DEFAULT_BACKSTOP = BackstopPlacement.MAXIMAL


def check_identifier(value: str, what: str) -> str:
    """Validate a tenant id or role name and return it unchanged."""
    if not isinstance(value, str) or not value:
        raise ModelError(f"{what} must be a non-empty string, got {value!r}")
    if _FORBIDDEN.search(value):
        raise ModelError(
            f"{what} {value!r} must not contain whitespace or {RESERVED_SEPARATOR!r}")
    return value


@dataclass(frozen=True)
class RoleParam:
    name: str
    value: str

    def __post_init__(self):
        if not self.name:
            raise ModelError("role parameter name must be non-empty")


@dataclass(frozen=True)
class ParameterizedRole:
    """A role tagged with its hierarchy: ``(roleName, rparamset, hierarchyId)``.

    ``params`` always holds exactly one ``hierarchy`` entry equal to
    ``hierarchy_id``; it is inserted first when the caller omits it.  Any
    other parameters are carried opaquely and do not take part in equality
    or hashing.
    """

    role_name: str
    hierarchy_id: str
    params: tuple[RoleParam, ...] = field(default=(), compare=False)

    def __post_init__(self):
        check_identifier(self.role_name, "role name")
        check_identifier(self.hierarchy_id, "tenant id")
        params = tuple(self.params)
        tags = [p for p in params if p.name == HIERARCHY_PARAM]
        if not tags:
            params = (RoleParam(HIERARCHY_PARAM, self.hierarchy_id),) + params
        elif len(tags) > 1:
            raise ModelError(f"role {self.role_name!r} carries several hierarchy parameters")
        elif tags[0].value != self.hierarchy_id:
            raise ModelError(
                f"role {self.role_name!r}: hierarchy parameter {tags[0].value!r} "
                f"disagrees with hierarchy id {self.hierarchy_id!r}")
        object.__setattr__(self, "params", params)

    def __str__(self) -> str:
        return f"{self.role_name}@{self.hierarchy_id}"

    @property
    def extra_params(self) -> tuple[RoleParam, ...]:
        return tuple(p for p in self.params if p.name != HIERARCHY_PARAM)


@dataclass(frozen=True)
class ObjectId:
    """A protected object.  ``owning_tenant`` of ``None`` marks it shared."""

    value: str
    owning_tenant: str | None = None

    def __post_init__(self):
        if not self.value:
            raise ModelError("object id must be non-empty")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Privilege:
    """An ``(object, access mode)`` pair."""

    object: ObjectId
    mode: str

    def __post_init__(self):
        if isinstance(self.object, str):
            object.__setattr__(self, "object", ObjectId(self.object))
        if not self.mode:
            raise ModelError("access mode must be non-empty")

    def __str__(self) -> str:
        return f"({self.object}, {self.mode})"


@dataclass(frozen=True)
class RoleHierarchy:
    """One tenant's roles and seniority edges ``(senior, junior)``.

    Build instances with :func:`new_hierarchy`, which enforces the
    invariants; the constructor itself does not validate.
    """

    tenant: str
    roles: frozenset[str]
    seniority: frozenset[tuple[str, str]]

    @cached_property
    def _juniors(self) -> dict[str, frozenset[str]]:
        children: dict[str, set[str]] = {r: set() for r in self.roles}
        for senior, junior in self.seniority:
            children[senior].add(junior)
        closure = {}
        for role in self.roles:
            seen: set[str] = set()
            queue = deque(children[role])
            while queue:
                r = queue.popleft()
                if r not in seen:
                    seen.add(r)
                    queue.extend(children[r])
            closure[role] = frozenset(seen)
        return closure

    def immediate_juniors(self, role: str) -> frozenset[str]:
        self._require(role)
        return frozenset(j for s, j in self.seniority if s == role)

    def immediate_seniors(self, role: str) -> frozenset[str]:
        self._require(role)
        return frozenset(s for s, j in self.seniority if j == role)

    def maximal_roles(self) -> frozenset[str]:
        """Roles with no senior."""
        juniors = {j for _, j in self.seniority}
        return frozenset(self.roles - juniors)

    def _require(self, role: str) -> None:
        if role not in self.roles:
            raise UnknownRoleError(f"role {role!r} is not in hierarchy {self.tenant!r}")


def new_hierarchy(tenant: str, roles: Iterable[str],
                  seniority: Iterable[tuple[str, str]] = ()) -> RoleHierarchy:
    """Validate and build a tenant's role hierarchy.

    Raises :class:`DuplicateRoleError` when a role name is listed twice,
    :class:`UnknownRoleError` when an edge names a role outside ``roles`` and
    :class:`CycleError` when the seniority relation is cyclic.
    """
    check_identifier(tenant, "tenant id")
    role_list = list(roles)
    seen: set[str] = set()
    for r in role_list:
        check_identifier(r, "role name")
        if r in seen:
            raise DuplicateRoleError(f"role {r!r} listed twice in hierarchy {tenant!r}")
        seen.add(r)
    edges = frozenset((s, j) for s, j in seniority)
    for s, j in sorted(edges):
        for r in (s, j):
            if r not in seen:
                raise UnknownRoleError(f"edge {s} -> {j} names unknown role {r!r}")
    sorter = graphlib.TopologicalSorter({r: set() for r in seen})
    for s, j in edges:
        sorter.add(j, s)
    try:
        sorter.prepare()
    except graphlib.CycleError as exc:
        cycle = tuple(exc.args[1])
        raise CycleError(
            f"seniority in hierarchy {tenant!r} is cyclic: {' -> '.join(cycle)}",
            cycle) from None
    return RoleHierarchy(tenant, frozenset(seen), edges)


def juniors_of(role: str, h: RoleHierarchy) -> frozenset[str]:
    """All roles reachable from ``role`` along seniority edges, excluding itself."""
    h._require(role)
    return h._juniors[role]


def level_of(role: str, h: RoleHierarchy) -> int:
    """Length of the longest seniority chain from a maximal role down to ``role``."""
    h._require(role)
    order = graphlib.TopologicalSorter({r: h.immediate_seniors(r) for r in h.roles})
    depth: dict[str, int] = {}
    for r in order.static_order():
        seniors = h.immediate_seniors(r)
        depth[r] = 1 + max((depth[s] for s in seniors), default=-1)
    return depth[role]


def dominates(senior: ParameterizedRole, junior: ParameterizedRole,
              merged: MergedRoleSet) -> bool:
    """Whether ``senior`` is ``junior`` or lies above it in the same tenant."""
    for role in (senior, junior):
        if role not in merged.roles:
            raise UnknownRoleError(f"role {role} is not in the merged role set")
    if senior == junior:
        return True
    if senior.hierarchy_id != junior.hierarchy_id:
        return False
    h = merged.hierarchies[senior.hierarchy_id]
    return junior.role_name in juniors_of(senior.role_name, h)


def dominated_roles(role: ParameterizedRole,
                    merged: MergedRoleSet) -> frozenset[ParameterizedRole]:
    """``role`` itself plus every role it dominates."""
    if role not in merged.roles:
        raise UnknownRoleError(f"role {role} is not in the merged role set")
    h = merged.hierarchies[role.hierarchy_id]
    below = {ParameterizedRole(name, role.hierarchy_id)
             for name in juniors_of(role.role_name, h)}
    return frozenset(below | {role})


#: subject id -> roles held directly
SubjectRoleAssignment = Mapping[str, Collection[ParameterizedRole]]
#: role -> privileges assigned directly
PrivilegeAssignment = Mapping[ParameterizedRole, Collection[Privilege]]


def check_assignments(merged: MergedRoleSet,
                      assignments: SubjectRoleAssignment | None = None,
                      pa: PrivilegeAssignment | None = None) -> None:
    """Raise :class:`UnknownRoleError` if an assignment names a role outside ``merged``."""
    for subject, roles in sorted((assignments or {}).items()):
        for role in roles:
            if role not in merged.roles:
                raise UnknownRoleError(f"subject {subject!r} holds unknown role {role}")
    for role in (pa or {}):
        if role not in merged.roles:
            raise UnknownRoleError(f"privileges assigned to unknown role {role}")


def effective_privileges(subject: str, assignments: SubjectRoleAssignment,
                         pa: PrivilegeAssignment,
                         merged: MergedRoleSet) -> frozenset[Privilege]:
    """Privileges a subject obtains through its roles and everything they dominate."""
    if subject not in assignments:
        raise UnknownSubjectError(f"subject {subject!r} has no role assignment")
    result: set[Privilege] = set()
    for held in assignments[subject]:
        if held not in merged.roles:
            raise UnknownRoleError(f"subject {subject!r} holds unknown role {held}")
        for role in dominated_roles(held, merged):
            result.update(pa.get(role, ()))
    return frozenset(result)
