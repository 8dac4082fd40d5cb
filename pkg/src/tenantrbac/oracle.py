"""Brute-force reference semantics and random instances for property testing.

``oracle_decide`` works straight from the hierarchies' edge sets with its
own fixed-point closure, sharing nothing with the compiler or the PDP
except the backstop placement constant.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

from .errors import ModelError, UnknownRoleError, UnknownSubjectError
from .merge import TENANT_PLACEHOLDER, PrivilegeTemplate, instantiate_privilege
from .model import (
    DEFAULT_BACKSTOP,
    BackstopPlacement,
    ObjectId,
    ParameterizedRole,
    Privilege,
    RoleHierarchy,
    new_hierarchy,
)

ROLE_NAME_POOL = ("admin", "physician", "nurse", "clerk", "auditor", "manager",
                  "analyst", "intern", "SystemAdministrator")
MODE_POOL = ("read", "write", "null", "create", "erase")
OBJECT_POOL = ("customerData", "prescription", "ledger", "report", "schedule", "inventory")

MAX_BOUNDS = dict(tenants=4, roles=6, objects=5, modes=3, subjects=8)


@dataclass(frozen=True)
class Bounds:
    """Upper size limits for :func:`random_instance`.

    With ``exact`` set every count is taken at its limit instead of drawn
    below it.
    """

    tenants: int = 4
    roles: int = 6
    objects: int = 5
    modes: int = 3
    subjects: int = 8
    exact: bool = False

    def __post_init__(self):
        for name, limit in MAX_BOUNDS.items():
            value = getattr(self, name)
            if not 1 <= value <= limit:
                raise ModelError(f"bound {name}={value} must lie in 1..{limit}")


FULL_BOUNDS = Bounds(exact=True)


@dataclass(frozen=True, eq=False)
class Instance:
    hierarchies: tuple[RoleHierarchy, ...]
    assignments: Mapping[str, frozenset[ParameterizedRole]]
    pa: Mapping[ParameterizedRole, frozenset[Privilege]]
    objects: tuple[ObjectId, ...]
    modes: tuple[str, ...]
    seed: int
    tenant_scoped: bool = field(default=False)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.hierarchies == other.hierarchies
                and dict(self.assignments) == dict(other.assignments)
                and dict(self.pa) == dict(other.pa)
                and self.objects == other.objects and self.modes == other.modes
                and self.seed == other.seed)

    __hash__ = None

    @cached_property
    def all_roles(self) -> frozenset[ParameterizedRole]:
        return frozenset(ParameterizedRole(name, h.tenant)
                         for h in self.hierarchies for name in h.roles)

    @cached_property
    def closure(self) -> dict[ParameterizedRole, frozenset[ParameterizedRole]]:
        return {r: frozenset(below) for r, below in _closure(self).items()}

    def requests(self) -> Iterator[tuple[str, ObjectId, str]]:
        for subject in sorted(self.assignments):
            for obj in self.objects:
                for mode in self.modes:
                    yield subject, obj, mode


def _closure(inst: Instance) -> dict[ParameterizedRole, set[ParameterizedRole]]:
    """Reflexive-transitive dominance by naive fixed-point iteration."""
    below = {r: {r} for r in inst.all_roles}
    edges = [(ParameterizedRole(s, h.tenant), ParameterizedRole(j, h.tenant))
             for h in inst.hierarchies for s, j in h.seniority]
    changed = True
    while changed:
        changed = False
        for senior, junior in edges:
            before = len(below[senior])
            below[senior] |= below[junior]
            changed |= len(below[senior]) != before
    return below


def oracle_privileges(inst: Instance, subject: str) -> set[Privilege]:
    """Every ``(role, privilege)`` pair reachable from the subject's roles."""
    if subject not in inst.assignments:
        raise UnknownSubjectError(f"subject {subject!r} has no role assignment")
    roles = inst.all_roles
    below = inst.closure
    granted = set()
    for held in inst.assignments[subject]:
        if held not in roles:
            raise UnknownRoleError(f"subject {subject!r} holds unknown role {held}")
        for role in below[held]:
            granted |= set(inst.pa.get(role, ()))
    return granted


def _has_backstop(role: ParameterizedRole, inst: Instance,
                  placement: BackstopPlacement) -> bool:
    if placement is BackstopPlacement.EVERY_ROLE:
        return True
    h = next(h for h in inst.hierarchies if h.tenant == role.hierarchy_id)
    return all(j != role.role_name for _, j in h.seniority)


def oracle_decide(inst: Instance, subject: str, object: ObjectId, mode: str,
                  placement: BackstopPlacement = DEFAULT_BACKSTOP) -> str:
    """Ground-truth outcome name: ``Permit``, ``Deny`` or ``NotApplicable``.

    Permit when the subject's closure holds ``(object, mode)``.  Otherwise
    Deny when some held role reaches a role carrying the compiled backstop;
    with the default placement that means holding a role without a senior.
    """
    if Privilege(object, mode) in oracle_privileges(inst, subject):
        return "Permit"
    below = inst.closure
    for held in inst.assignments[subject]:
        if any(_has_backstop(r, inst, placement) for r in below[held]):
            return "Deny"
    return "NotApplicable"


def _random_dag(rng: random.Random, tenant: str, names: list[str]) -> RoleHierarchy:
    order = names[:]
    rng.shuffle(order)
    density = rng.choice((0.0, 0.25, 0.5, 0.8))
    edges = [(order[i], order[j]) for i in range(len(order))
             for j in range(i + 1, len(order)) if rng.random() < density]
    return new_hierarchy(tenant, names, edges)


def random_instance(seed: int, bounds: Bounds = Bounds(),
                    tenant_scoped: bool = False) -> Instance:
    """A deterministic random instance.

    Role names come from a small pool so tenants regularly share names.
    With ``tenant_scoped`` every privilege is a ``{tenant}/<name>`` template
    instantiated at the grantee's tenant; ``bounds.objects`` then limits the
    number of template names and the object universe holds each name once
    per tenant.
    """
    rng = random.Random(seed)

    def count(limit: int) -> int:
        return limit if bounds.exact else rng.randint(1, limit)

    tenants = [f"T{i}" for i in range(count(bounds.tenants))]
    hierarchies = tuple(
        _random_dag(rng, t, rng.sample(ROLE_NAME_POOL, count(bounds.roles)))
        for t in tenants)
    modes = tuple(sorted(rng.sample(MODE_POOL, count(bounds.modes))))
    n_objects = count(bounds.objects)
    names = rng.sample(OBJECT_POOL, n_objects)
    roles = [ParameterizedRole(name, h.tenant) for h in hierarchies for name in sorted(h.roles)]
    pa = {}
    if tenant_scoped:
        templates = [PrivilegeTemplate(f"{TENANT_PLACEHOLDER}/{n}", m)
                     for n in names for m in modes]
        objects = tuple(ObjectId(f"{t}/{n}", t) for t in tenants for n in names)
        for role in roles:
            chosen = rng.sample(templates, rng.randint(0, min(3, len(templates))))
            if chosen:
                pa[role] = frozenset(instantiate_privilege(t, role.hierarchy_id)
                                     for t in chosen)
    else:
        objects = []
        for name in names:
            owner = rng.choice(tenants + [None])
            objects.append(ObjectId(f"{owner}/{name}", owner) if owner else ObjectId(name))
        objects = tuple(objects)
        for role in roles:
            candidates = [Privilege(o, m) for o in objects for m in modes]
            chosen = rng.sample(candidates, rng.randint(0, min(3, len(candidates))))
            if chosen:
                pa[role] = frozenset(chosen)
    assignments = {}
    for i in range(count(bounds.subjects)):
        if tenant_scoped and rng.random() < 0.7:
            tenant = rng.choice(tenants)
            pool = [r for r in roles if r.hierarchy_id == tenant]
        else:
            pool = roles
        k = rng.randint(0, min(3, len(pool)))
        assignments[f"s{i}"] = frozenset(rng.sample(pool, k))
    return Instance(hierarchies, assignments, pa, objects, modes, seed, tenant_scoped)


def check_instance_valid(inst: Instance) -> list[str]:
    """Invariant violations in ``inst``; empty for every generated instance."""
    problems = []
    tenants = [h.tenant for h in inst.hierarchies]
    if len(set(tenants)) != len(tenants):
        problems.append("duplicate tenant ids")
    for h in inst.hierarchies:
        try:
            rebuilt = new_hierarchy(h.tenant, sorted(h.roles), h.seniority)
        except ModelError as exc:
            problems.append(f"{h.tenant}: {exc}")
            continue
        if rebuilt != h:
            problems.append(f"{h.tenant}: hierarchy does not round-trip")
    roles = inst.all_roles
    for role, privileges in inst.pa.items():
        if role not in roles:
            problems.append(f"pa names unknown role {role}")
        for p in privileges:
            if p.object not in inst.objects or p.mode not in inst.modes:
                problems.append(f"pa of {role} grants {p} outside the universe")
            if inst.tenant_scoped and p.object.owning_tenant != role.hierarchy_id:
                problems.append(f"pa of {role} grants foreign object {p.object}")
    for subject, held in inst.assignments.items():
        for role in held:
            if role not in roles:
                problems.append(f"{subject} holds unknown role {role}")
    if len({o.value for o in inst.objects}) != len(inst.objects):
        problems.append("object values are not unique")
    return problems


# -- engine cross-check ------------------------------------------------------

@dataclass(frozen=True)
class Divergence:
    seed: int
    subject: str
    object: str
    mode: str
    oracle: str
    engine: str

    def __str__(self) -> str:
        return (f"seed={self.seed} subject={self.subject} object={self.object} "
                f"mode={self.mode} oracle={self.oracle} engine={self.engine}")


def engine_decisions(inst: Instance, scheme=None,
                     placement: BackstopPlacement = DEFAULT_BACKSTOP,
                     ) -> Iterator[tuple[tuple[str, ObjectId, str], str]]:
    """Run every request triple of ``inst`` through merge, compile and the PDP."""
    from .compiler import DEFAULT_SCHEME, compile
    from .merge import merge_hierarchies
    from .pdp import RequestContext, enable_roles, evaluate_request

    scheme = scheme or DEFAULT_SCHEME
    merged = merge_hierarchies(inst.hierarchies)
    repo = compile(merged, inst.pa, scheme, placement)
    for subject, obj, mode in inst.requests():
        roles = enable_roles(subject, inst.assignments, scheme, merged)
        req = RequestContext.build(obj.value, mode, roles, scheme.role_attribute_id)
        yield (subject, obj, mode), evaluate_request(repo, req).outcome.value


def find_divergences(inst: Instance, scheme=None,
                     placement: BackstopPlacement = DEFAULT_BACKSTOP) -> list[Divergence]:
    out = []
    for (subject, obj, mode), engine in engine_decisions(inst, scheme, placement):
        expected = oracle_decide(inst, subject, obj, mode, placement)
        if expected != engine:
            out.append(Divergence(inst.seed, subject, obj.value, mode, expected, engine))
    return out


def fuzz(seeds: range | list[int], bounds: Bounds = Bounds(), scheme=None,
         placement: BackstopPlacement = DEFAULT_BACKSTOP) -> list[Divergence]:
    """Divergences between oracle and engine over many seeds; empty on success."""
    report = []
    for seed in seeds:
        report.extend(find_divergences(random_instance(seed, bounds), scheme, placement))
    return report


def isolation_violations(inst: Instance, scheme=None,
                         placement: BackstopPlacement = DEFAULT_BACKSTOP) -> list[Divergence]:
    """Engine Permits on tenant-owned objects for subjects with no role in that tenant."""
    out = []
    for (subject, obj, mode), engine in engine_decisions(inst, scheme, placement):
        owner = obj.owning_tenant
        tenants = {r.hierarchy_id for r in inst.assignments[subject]}
        if engine == "Permit" and owner is not None and owner not in tenants:
            out.append(Divergence(inst.seed, subject, obj.value, mode, "not Permit", engine))
    return out
