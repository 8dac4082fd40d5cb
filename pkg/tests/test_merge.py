import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tenantrbac import (
    ObjectId,
    ParameterizedRole,
    Privilege,
    PrivilegeTemplate,
    RoleParam,
    instantiate_privilege,
    merge_hierarchies,
    new_hierarchy,
    reconstitute,
)
from tenantrbac.errors import DuplicateTenantError, ModelError, UnknownRoleError, UnknownTenantError
from tenantrbac.oracle import random_instance


def four(tenant, names=("admin", "b", "c", "d")):
    return new_hierarchy(tenant, names, {(names[0], n) for n in names[1:]})


def test_two_hierarchies_of_four_give_eight_roles():
    h0, h1 = four("T0"), four("T1")
    merged = merge_hierarchies([h0, h1])
    expected = {(n, t) for t, h in (("T0", h0), ("T1", h1)) for n in h.roles}
    assert {(r.role_name, r.hierarchy_id) for r in merged.roles} == expected
    assert len(merged.roles) == 8


def test_same_name_in_two_tenants_stays_distinct():
    merged = merge_hierarchies([four("T0"), four("T1")])
    assert ParameterizedRole("admin", "T0") in merged.roles
    assert ParameterizedRole("admin", "T1") in merged.roles
    assert ParameterizedRole("admin", "T0") != ParameterizedRole("admin", "T1")


def test_singleton_round_trip():
    h0 = four("T0")
    assert reconstitute(merge_hierarchies([h0]), "T0") == h0


def test_unknown_tenant():
    with pytest.raises(UnknownTenantError):
        reconstitute(merge_hierarchies([four("T0")]), "T9")


def test_duplicate_tenant():
    with pytest.raises(DuplicateTenantError):
        merge_hierarchies([four("T0"), four("T0")])


def test_roles_tagged_with_hierarchy():
    merged = merge_hierarchies([four("T0"), four("T1")])
    for r in merged.roles:
        tags = [p for p in r.params if p.name == "hierarchy"]
        assert tags == [RoleParam("hierarchy", r.hierarchy_id)]


def test_extra_params_are_carried():
    merged = merge_hierarchies([four("T0")],
                               extra_params={("T0", "b"): [RoleParam("className", "readCustData")]})
    b = merged.role("b", "T0")
    assert b.extra_params == (RoleParam("className", "readCustData"),)
    with pytest.raises(UnknownRoleError):
        merge_hierarchies([four("T0")], extra_params={("T0", "zz"): []})


def test_merged_helpers():
    merged = merge_hierarchies([four("T0")])
    admin = merged.role("admin", "T0")
    assert merged.is_maximal(admin)
    assert {r.role_name for r in merged.immediate_juniors(admin)} == {"b", "c", "d"}
    assert merged.roles_of("T0") == merged.roles


@pytest.mark.parametrize("seed", range(100))
def test_round_trip_and_cardinality_random(seed):
    inst = random_instance(seed)
    merged = merge_hierarchies(inst.hierarchies)
    assert len(merged.roles) == sum(len(h.roles) for h in inst.hierarchies)
    for h in inst.hierarchies:
        assert reconstitute(merged, h.tenant) == h


@settings(max_examples=50, deadline=None)
@given(st.randoms(use_true_random=False))
def test_merge_order_insensitive(rnd):
    inst = random_instance(rnd.randint(0, 10_000))
    order = list(inst.hierarchies)
    rnd.shuffle(order)
    assert merge_hierarchies(order).roles == merge_hierarchies(inst.hierarchies).roles


def test_instantiate_tenant_template():
    p = instantiate_privilege(PrivilegeTemplate("{tenant}/customerData", "read"), "T0")
    assert p == Privilege(ObjectId("T0/customerData", "T0"), "read")
    assert p.object.owning_tenant == "T0"


def test_instantiate_write_template_other_tenant():
    p = instantiate_privilege(PrivilegeTemplate("{tenant}/customerData", "write"), "T1")
    assert p == Privilege(ObjectId("T1/customerData", "T1"), "write")


def test_template_without_placeholder_is_shared():
    p = instantiate_privilege(PrivilegeTemplate("customerData", "null"), "T0")
    assert p == Privilege(ObjectId("customerData", None), "null")


@given(st.text(alphabet="abcXYZ/_-.", min_size=0, max_size=12),
       st.text(alphabet="abcXYZ/_-.", min_size=0, max_size=12),
       st.sampled_from(["T0", "T1", "acme", "globex"]))
def test_instantiation_is_direct_replacement(prefix, suffix, tenant):
    pattern = prefix + "{tenant}" + suffix
    p = instantiate_privilege(PrivilegeTemplate(pattern, "read"), tenant)
    assert p.object.value == prefix + tenant + suffix


def test_template_placeholder_at_most_once():
    with pytest.raises(ModelError):
        PrivilegeTemplate("{tenant}/{tenant}", "read")
