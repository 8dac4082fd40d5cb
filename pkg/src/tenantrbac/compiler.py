"""Lower a merged role set and its privilege assignment to layered policies.

Every role ``r`` yields two policy sets:

* a role policy set (RPS) whose target matches the subject role attribute
  against ``r``'s tenant-qualified URI and whose only child references
  ``r``'s permission policy set;
* a permission policy set (PPS) holding one Permit rule per privilege
  assigned to ``r`` plus a reference to the PPS of each immediate junior.

The trailing empty-target Deny rule goes where
:class:`~tenantrbac.model.BackstopPlacement` says, by default only into
the PPS of roles that have no senior.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NamingCollisionError, UnknownRoleError
from .merge import MergedRoleSet
from .model import (
    DEFAULT_BACKSTOP,
    BackstopPlacement,
    ParameterizedRole,
    Privilege,
    PrivilegeAssignment,
)
from .policy import (
    ACTION_ID,
    RESOURCE_ID,
    SUBJECT_ROLE,
    XS_ANYURI,
    XS_STRING,
    AttributeDesignator,
    Category,
    CombiningAlg,
    Effect,
    MatchFunction,
    MatchNode,
    PolicyNode,
    PolicyRepository,
    PolicySetNode,
    Reference,
    RuleNode,
    TargetNode,
    validate_repository,
)

FINAL_RULE_ID = "FinalRule"


@dataclass(frozen=True)
class CompilationNamingScheme:
    """How roles become attribute values and policy identifiers.

    Patterns are :meth:`str.format` templates over ``tenant`` and ``role``;
    rule ids additionally see ``object`` and ``mode``.  With
    ``tenant_segment`` off the role URI omits the tenant, which reproduces
    single-tenant documents but is not injective across tenants.
    """

    role_attribute_id: str = SUBJECT_ROLE
    role_value_prefix: str = "urn:example:rolevalues"
    rps_id_pattern: str = "RPS:{tenant}:{role}:role"
    pps_id_pattern: str = "PPS:{tenant}:{role}:role"
    policy_id_pattern: str = "Permissions:{tenant}:{role}"
    rule_id_pattern: str = "Permission:to:{mode}:{object}"
    tenant_segment: bool = True

    def rps_id(self, role: ParameterizedRole) -> str:
        return self.rps_id_pattern.format(tenant=role.hierarchy_id, role=role.role_name)

    def pps_id(self, role: ParameterizedRole) -> str:
        return self.pps_id_pattern.format(tenant=role.hierarchy_id, role=role.role_name)

    def policy_id(self, role: ParameterizedRole) -> str:
        return self.policy_id_pattern.format(tenant=role.hierarchy_id, role=role.role_name)

    def rule_id(self, role: ParameterizedRole, privilege: Privilege) -> str:
        return self.rule_id_pattern.format(tenant=role.hierarchy_id, role=role.role_name,
                                           object=privilege.object.value,
                                           mode=privilege.mode)


DEFAULT_SCHEME = CompilationNamingScheme()

#: Reproduces the single-tenant identifiers of the physician example.
SINGLE_TENANT_SCHEME = CompilationNamingScheme(
    rps_id_pattern="RPS:{role}:role",
    pps_id_pattern="PPS:{role}:role",
    policy_id_pattern="Permissions:specifically:for:the:{role}",
    rule_id_pattern="Permission:to:{mode}:{object}s",
    tenant_segment=False,
)


def role_attribute_value(role: ParameterizedRole,
                         scheme: CompilationNamingScheme = DEFAULT_SCHEME) -> str:
    """The subject role URI for ``role``, e.g. ``urn:example:rolevalues:T0:physician``."""
    if scheme.tenant_segment:
        return f"{scheme.role_value_prefix}:{role.hierarchy_id}:{role.role_name}"
    return f"{scheme.role_value_prefix}:{role.role_name}"


def _string_match(category: Category, attribute_id: str, value: str) -> MatchNode:
    return MatchNode(MatchFunction.STRING_EQUAL, value, XS_STRING,
                     AttributeDesignator(category, attribute_id, XS_STRING))


def _role_target(role: ParameterizedRole, scheme: CompilationNamingScheme) -> TargetNode:
    match = MatchNode(MatchFunction.ANYURI_EQUAL, role_attribute_value(role, scheme), XS_ANYURI,
                      AttributeDesignator(Category.SUBJECT, scheme.role_attribute_id, XS_ANYURI))
    return TargetNode(subjects=((match,),))


def _permit_rule(role, privilege, scheme) -> RuleNode:
    target = TargetNode(
        resources=((_string_match(Category.RESOURCE, RESOURCE_ID, privilege.object.value),),),
        actions=((_string_match(Category.ACTION, ACTION_ID, privilege.mode),),),
    )
    return RuleNode(scheme.rule_id(role, privilege), Effect.PERMIT, target)


def _check_unique(ids: dict[str, object], what: str) -> None:
    if len(set(ids.values())) != len(ids):
        seen: dict[object, str] = {}
        for key, value in ids.items():
            if value in seen:
                raise NamingCollisionError(f"{what} {value!r} produced for both "
                                           f"{seen[value]} and {key}")
            seen[value] = str(key)


def has_backstop(role: ParameterizedRole, merged: MergedRoleSet,
                 placement: BackstopPlacement = DEFAULT_BACKSTOP) -> bool:
    if placement is BackstopPlacement.EVERY_ROLE:
        return True
    return merged.is_maximal(role)


def compile(merged: MergedRoleSet, pa: PrivilegeAssignment,
            scheme: CompilationNamingScheme = DEFAULT_SCHEME,
            placement: BackstopPlacement = DEFAULT_BACKSTOP) -> PolicyRepository:
    """Compile ``merged`` and ``pa`` to a validated RPS/PPS repository.

    The roots of the result are the RPS ids.  Raises
    :class:`UnknownRoleError` if ``pa`` names a role outside ``merged`` and
    :class:`NamingCollisionError` if ``scheme`` maps distinct roles or
    privileges to the same identifier.
    """
    for role in pa:
        if role not in merged.roles:
            raise UnknownRoleError(f"privileges assigned to unknown role {role}")
    roles = merged.sorted_roles()
    all_ids: dict[object, str] = {}
    for role in roles:
        all_ids[("RPS", role)] = scheme.rps_id(role)
        all_ids[("PPS", role)] = scheme.pps_id(role)
    _check_unique(all_ids, "policy set id")
    _check_unique({r: role_attribute_value(r, scheme) for r in roles}, "role attribute value")

    documents = []
    for role in roles:
        rps = PolicySetNode(scheme.rps_id(role), CombiningAlg.PERMIT_OVERRIDES,
                            _role_target(role, scheme), (Reference(scheme.pps_id(role)),))
        privileges = sorted(pa.get(role, ()),
                            key=lambda p: (p.object.value, p.mode,
                                           p.object.owning_tenant or ""))
        rules = [_permit_rule(role, p, scheme) for p in privileges]
        if has_backstop(role, merged, placement):
            rules.append(RuleNode(FINAL_RULE_ID, Effect.DENY))
        rule_ids = [r.id for r in rules]
        for rid in rule_ids:
            if rule_ids.count(rid) > 1:
                raise NamingCollisionError(
                    f"rule id {rid!r} repeated in {scheme.pps_id(role)}")
        children: list = []
        if rules:
            children.append(PolicyNode(scheme.policy_id(role), CombiningAlg.PERMIT_OVERRIDES,
                                       TargetNode(), tuple(rules)))
        juniors = sorted(merged.immediate_juniors(role), key=lambda r: r.role_name)
        children.extend(Reference(scheme.pps_id(j)) for j in juniors)
        pps = PolicySetNode(scheme.pps_id(role), CombiningAlg.PERMIT_OVERRIDES, TargetNode(),
                            tuple(children))
        documents.extend([rps, pps])
    policy_ids = {("Policy", r): scheme.policy_id(r) for r in roles}
    _check_unique(all_ids | policy_ids, "policy id")
    repo = PolicyRepository.from_documents(documents, [scheme.rps_id(r) for r in roles])
    diags = validate_repository(repo)
    assert not diags, diags
    return repo
