from dataclasses import replace

import pytest

from tenantrbac import fixtures
from tenantrbac.compiler import (
    SINGLE_TENANT_SCHEME,
    DEFAULT_SCHEME,
    FINAL_RULE_ID,
    CompilationNamingScheme,
    compile,
    role_attribute_value,
)
from tenantrbac.errors import NamingCollisionError, UnknownRoleError
from tenantrbac.merge import merge_hierarchies
from tenantrbac.model import (
    BackstopPlacement,
    ObjectId,
    ParameterizedRole,
    Privilege,
    new_hierarchy,
)
from tenantrbac.oracle import Bounds, random_instance
from tenantrbac.pdp import Outcome, RequestContext, evaluate_request
from tenantrbac.policy import (
    PolicyNode,
    PolicySetNode,
    Reference,
    parse_policy_document,
    serialize,
    walk,
)


def _physician_repo(scheme=SINGLE_TENANT_SCHEME):
    merged = merge_hierarchies([new_hierarchy("hospital", ["physician"])])
    role = ParameterizedRole("physician", "hospital")
    return compile(merged, {role: {Privilege("prescription", "create")}}, scheme)


def test_compiled_physician_rps_equals_fixture():
    repo = _physician_repo()
    expected = parse_policy_document(fixtures.read(fixtures.RPS_FILE))
    assert repo.index["RPS:physician:role"] == expected


def test_compiled_physician_pps_equals_fixture_without_obligation():
    repo = _physician_repo()
    fixture = parse_policy_document(fixtures.read(fixtures.PPS_FILE))
    (policy,) = fixture.children
    expected = replace(fixture, children=(replace(policy, obligations=()),))
    assert repo.index["PPS:physician:role"] == expected


def test_compiled_documents_serialize_and_reparse():
    for doc in _physician_repo(DEFAULT_SCHEME).documents:
        assert parse_policy_document(serialize(doc)) == doc


def test_role_attribute_values():
    role = ParameterizedRole("physician", "T0")
    assert role_attribute_value(role) == "urn:example:rolevalues:T0:physician"
    assert role_attribute_value(role, SINGLE_TENANT_SCHEME) == fixtures.PHYSICIAN_ROLE


def test_role_without_privileges(admin_merged):
    repo = compile(admin_merged, {})
    admin = repo.index["PPS:T0:SystemAdministrator:role"]
    policy = admin.children[0]
    assert isinstance(policy, PolicyNode)
    assert [r.id for r in policy.rules] == [FINAL_RULE_ID]
    assert [c.target_id for c in admin.children[1:]] == [
        "PPS:T0:A:role", "PPS:T0:B:role", "PPS:T0:C:role"]
    junior = repo.index["PPS:T0:A:role"]
    assert junior.children == ()


def test_every_role_placement(admin_merged):
    repo = compile(admin_merged, {}, placement=BackstopPlacement.EVERY_ROLE)
    for name in "ABC":
        (policy,) = repo.index[f"PPS:T0:{name}:role"].children
        assert [r.id for r in policy.rules] == [FINAL_RULE_ID]


def test_administrator_gets_every_subordinate_privilege(admin_merged):
    pa = {ParameterizedRole(name, "T0"): {Privilege(f"obj{name}", "read")} for name in "ABC"}
    repo = compile(admin_merged, pa)
    admin = [role_attribute_value(ParameterizedRole("SystemAdministrator", "T0"))]
    for name in "ABC":
        req = RequestContext.build(f"obj{name}", "read", admin)
        assert evaluate_request(repo, req).outcome is Outcome.PERMIT
        own = [role_attribute_value(ParameterizedRole(name, "T0"))]
        for other in "ABC":
            req = RequestContext.build(f"obj{other}", "read", own)
            expected = Outcome.PERMIT if other == name else Outcome.NOT_APPLICABLE
            assert evaluate_request(repo, req).outcome is expected
    req = RequestContext.build("objA", "write", admin)
    assert evaluate_request(repo, req).outcome is Outcome.DENY


def test_rules_sorted_and_deterministic():
    merged = merge_hierarchies([new_hierarchy("T0", ["r"])])
    role = ParameterizedRole("r", "T0")
    privs = [Privilege("b", "read"), Privilege("a", "write"), Privilege("a", "read")]
    one = compile(merged, {role: set(privs)})
    two = compile(merged, {role: list(reversed(privs))})
    rules = one.index["PPS:T0:r:role"].children[0].rules
    assert [r.id for r in rules] == ["Permission:to:read:a", "Permission:to:write:a",
                                     "Permission:to:read:b", FINAL_RULE_ID]
    assert [serialize(d) for d in one.documents] == [serialize(d) for d in two.documents]


@pytest.mark.parametrize("seed", range(60))
def test_ids_injective_and_reference_graph_mirrors_seniority(seed):
    inst = random_instance(seed, Bounds())
    merged = merge_hierarchies(inst.hierarchies)
    repo = compile(merged, inst.pa)
    ids = [n.id for d in repo.documents for n in walk(d)
           if isinstance(n, (PolicySetNode, PolicyNode))]
    assert len(ids) == len(set(ids))
    assert len(repo.roots) == len(merged.roles)
    owner = {DEFAULT_SCHEME.pps_id(r): r for r in merged.roles}
    edges = set()
    for d in repo.documents:
        if d.id in owner:
            for c in d.children:
                if isinstance(c, Reference):
                    edges.add((owner[d.id], owner[c.target_id]))
    expected = {(ParameterizedRole(s, h.tenant), ParameterizedRole(j, h.tenant))
                for h in inst.hierarchies for s, j in h.seniority}
    assert edges == expected
    assert all(s.hierarchy_id == j.hierarchy_id for s, j in edges)


def test_shared_role_name_gets_distinct_policies():
    merged = merge_hierarchies([new_hierarchy("T0", ["admin"]), new_hierarchy("T1", ["admin"])])
    repo = compile(merged, {})
    assert set(repo.roots) == {"RPS:T0:admin:role", "RPS:T1:admin:role"}


def test_tenantless_scheme_collides_on_shared_names():
    merged = merge_hierarchies([new_hierarchy("T0", ["admin"]), new_hierarchy("T1", ["admin"])])
    with pytest.raises(NamingCollisionError):
        compile(merged, {}, SINGLE_TENANT_SCHEME)


def test_rule_id_collision():
    scheme = CompilationNamingScheme(rule_id_pattern="Permission:{mode}")
    merged = merge_hierarchies([new_hierarchy("T0", ["r"])])
    role = ParameterizedRole("r", "T0")
    with pytest.raises(NamingCollisionError):
        compile(merged, {role: {Privilege("a", "read"), Privilege("b", "read")}}, scheme)


def test_unknown_role_in_assignment():
    merged = merge_hierarchies([new_hierarchy("T0", ["r"])])
    with pytest.raises(UnknownRoleError):
        compile(merged, {ParameterizedRole("r", "T9"): {Privilege("a", "read")}})


def test_custom_prefix_and_attribute():
    scheme = CompilationNamingScheme(role_attribute_id="urn:x:role", role_value_prefix="urn:x")
    merged = merge_hierarchies([new_hierarchy("T0", ["r"])])
    role = ParameterizedRole("r", "T0")
    repo = compile(merged, {role: {Privilege(ObjectId("T0/a", "T0"), "read")}}, scheme)
    req = RequestContext.build("T0/a", "read", ["urn:x:T0:r"], "urn:x:role")
    assert evaluate_request(repo, req).outcome is Outcome.PERMIT
    req = RequestContext.build("T0/a", "read", ["urn:x:T0:r"])
    assert evaluate_request(repo, req).outcome is Outcome.NOT_APPLICABLE
