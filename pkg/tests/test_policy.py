import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tenantrbac import fixtures
from tenantrbac.errors import (
    InvalidDocumentError,
    PolicyParseError,
    TypeMismatchError,
    UnknownCombiningAlgError,
    UnsupportedElementError,
    WellFormednessError,
)
from tenantrbac.policy import (
    XS_ANYURI,
    Category,
    CombiningAlg,
    DiagnosticKind,
    Effect,
    MatchFunction,
    PolicyNode,
    PolicyRepository,
    PolicySetNode,
    Reference,
    RuleNode,
    TargetNode,
    parse_policy_document,
    serialize,
    validate_repository,
)

from treegen import mutate, random_tree

NS = 'xmlns="urn:oasis:names:tc:xacml:1.0:policy"'
PO = "urn:oasis:names:tc:xacml:1.0:policy-combining-algorithm:permit-overrides"


def doc(body="", alg=PO, pid="PS1"):
    return f'<PolicySet {NS} PolicySetId="{pid}" PolicyCombiningAlgId="{alg}">{body}</PolicySet>'


def test_rps_fixture_structure():
    rps = parse_policy_document(fixtures.read(fixtures.RPS_FILE))
    assert rps.id == "RPS:physician:role"
    assert rps.combining_alg is CombiningAlg.PERMIT_OVERRIDES
    (group,) = rps.target.subjects
    (match,) = group
    assert match.match_fn is MatchFunction.ANYURI_EQUAL
    assert match.value == "urn:example:rolevalues:physician"
    assert match.designator.attribute_id == "urn:oasis:names:tc:xacml:1.0:subject:role"
    assert match.designator.category is Category.SUBJECT
    assert rps.target.resources is None and rps.target.actions is None
    assert rps.children == (Reference("PPS:physician:role"),)


def test_verbatim_role_sample_parses_to_normalized_fixture():
    verbatim = parse_policy_document(fixtures.read(fixtures.RPS_VERBATIM))
    assert verbatim == parse_policy_document(fixtures.read(fixtures.RPS_FILE))


def test_verbatim_permission_sample_is_not_well_formed():
    with pytest.raises(WellFormednessError) as info:
        parse_policy_document(fixtures.read(fixtures.PPS_VERBATIM))
    assert info.value.line is not None


def test_pps_fixture_structure():
    pps = parse_policy_document(fixtures.read(fixtures.PPS_FILE))
    (policy,) = pps.children
    assert isinstance(policy, PolicyNode)
    assert policy.id == "Permissions:specifically:for:the:physician"
    assert [r.id for r in policy.rules] == ["Permission:to:create:prescriptions", "FinalRule"]
    assert [r.effect for r in policy.rules] == [Effect.PERMIT, Effect.DENY]
    assert policy.rules[1].target is None
    (ob,) = policy.obligations
    assert ob.fulfill_on is Effect.PERMIT
    assert ob.assignments[0].value == "only physicians can create prescriptions"


def test_minimal_policy_set():
    node = parse_policy_document(doc("<Target/>"))
    assert node == PolicySetNode("PS1", CombiningAlg.PERMIT_OVERRIDES)
    assert node.target.is_empty
    assert parse_policy_document(doc()) == node


@pytest.mark.parametrize("alg", [
    "urn:oasis:names:tc:xacml:1.0:policy-combining-algorithm:only-one-applicable",
    "urn:oasis:names:tc:xacml:1.0:rule-combining-algorithm:permit-overrides",
    "permit-overrides",
])
def test_unknown_policy_combining_alg(alg):
    with pytest.raises(UnknownCombiningAlgError):
        parse_policy_document(doc(alg=alg))


def test_unknown_rule_combining_alg():
    body = ('<Policy PolicyId="p" RuleCombiningAlgId="urn:oasis:names:tc:xacml:1.0:'
            'rule-combining-algorithm:only-one-applicable"/>')
    with pytest.raises(UnknownCombiningAlgError) as info:
        parse_policy_document(doc(body))
    assert info.value.line == 1


def _match(fn, dt, ddt):
    return (f'<Target><Subjects><Subject><SubjectMatch MatchId="urn:oasis:names:tc:xacml:1.0:'
            f'function:{fn}"><AttributeValue DataType="{dt}">v</AttributeValue>'
            f'<SubjectAttributeDesignator AttributeId="urn:a" DataType="{ddt}"/>'
            f'</SubjectMatch></Subject></Subjects></Target>')


@pytest.mark.parametrize("fn,dt,ddt", [
    ("string-equal", XS_ANYURI, XS_ANYURI),
    ("anyURI-equal", "http://www.w3.org/2001/XMLSchema#string",
     "http://www.w3.org/2001/XMLSchema#string"),
    ("anyURI-equal", XS_ANYURI, "http://www.w3.org/2001/XMLSchema#string"),
])
def test_match_type_mismatch(fn, dt, ddt):
    with pytest.raises(TypeMismatchError):
        parse_policy_document(doc(_match(fn, dt, ddt)))


@pytest.mark.parametrize("text,error", [
    ("<PolicySet/>", UnsupportedElementError),
    (doc("<Description>x</Description>"), UnsupportedElementError),
    (doc("<Target/><Target/>"), InvalidDocumentError),
    (doc('<Policy PolicyId="p"/>'), InvalidDocumentError),
    (doc("stray text"), InvalidDocumentError),
    (doc("<PolicyIdReference>x</PolicyIdReference>"), UnsupportedElementError),
    (doc("<PolicySetIdReference> </PolicySetIdReference>"), InvalidDocumentError),
    (f'<Policy {NS} PolicyId="p" RuleCombiningAlgId="x"/>', UnsupportedElementError),
    (doc().replace("PolicySet ", 'PolicySet Version="2" ', 1), UnsupportedElementError),
    ('<!DOCTYPE x [<!ENTITY a "b">]>' + doc(), UnsupportedElementError),
    ("<?pi x?>" + doc(), UnsupportedElementError),
    (doc("<Target><Subjects/></Target>"), InvalidDocumentError),
    (doc("<x:Foo xmlns:x='urn:other'/>"), UnsupportedElementError),
    (doc('<Policy PolicyId="p" RuleCombiningAlgId="urn:oasis:names:tc:xacml:1.0:rule-'
         'combining-algorithm:permit-overrides"><Rule RuleId="r" Effect="Maybe"/></Policy>'),
     InvalidDocumentError),
    ("<PolicySet", WellFormednessError),
    ("", WellFormednessError),
])
def test_rejections(text, error):
    with pytest.raises(error) as info:
        parse_policy_document(text)
    assert isinstance(info.value, PolicyParseError)


def test_diagnostics_carry_positions():
    text = doc("\n\n  <Bogus/>")
    with pytest.raises(UnsupportedElementError) as info:
        parse_policy_document(text)
    assert info.value.position == (3, 3)


def test_serialize_round_trips_fixtures():
    for name in (fixtures.RPS_FILE, fixtures.PPS_FILE):
        node = parse_policy_document(fixtures.read(name))
        again = parse_policy_document(serialize(node))
        assert again == node
        assert serialize(again) == serialize(node)


def test_serialize_keeps_rule_order():
    pps = parse_policy_document(fixtures.read(fixtures.PPS_FILE))
    text = serialize(pps)
    assert text.index("Permission:to:create:prescriptions") < text.index("FinalRule")
    rules = parse_policy_document(text).children[0].rules
    assert [r.id for r in rules] == ["Permission:to:create:prescriptions", "FinalRule"]


def test_empty_policy_set_canonical_document():
    text = serialize(PolicySetNode("PS1", CombiningAlg.DENY_OVERRIDES))
    assert text == ('<?xml version="1.0" encoding="UTF-8"?>\n'
                    '<PolicySet xmlns="urn:oasis:names:tc:xacml:1.0:policy" PolicySetId="PS1" '
                    'PolicyCombiningAlgId="urn:oasis:names:tc:xacml:1.0:policy-combining-'
                    'algorithm:deny-overrides">\n  <Target />\n</PolicySet>\n')


def test_rule_with_empty_target_differs_from_absent_target():
    body = ('<Policy PolicyId="p" RuleCombiningAlgId="urn:oasis:names:tc:xacml:1.0:rule-'
            'combining-algorithm:first-applicable"><Rule RuleId="a" Effect="Deny"><Target/>'
            '</Rule><Rule RuleId="b" Effect="Deny"/></Policy>')
    node = parse_policy_document(doc(body))
    a, b = node.children[0].rules
    assert a.target == TargetNode() and b.target is None
    assert parse_policy_document(serialize(node)) == node


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_generated_trees_round_trip(rnd):
    tree = random_tree(random.Random(rnd.random()))
    assert parse_policy_document(serialize(tree)) == tree


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=300))
def test_parser_total_on_arbitrary_bytes(data):
    try:
        parse_policy_document(data)
    except PolicyParseError:
        pass


@pytest.mark.parametrize("seed", range(20))
def test_parser_total_on_mutations(seed):
    rng = random.Random(seed)
    base = fixtures.read(fixtures.PPS_FILE).encode()
    for _ in range(100):
        try:
            node = parse_policy_document(mutate(base, rng))
        except PolicyParseError as exc:
            assert exc.message
        else:
            assert parse_policy_document(serialize(node)) == node


def test_validate_fixture_pair_is_clean(physician_repo):
    assert validate_repository(physician_repo) == []
    assert physician_repo.roots == ("RPS:physician:role",)


def test_dangling_reference():
    rps = parse_policy_document(fixtures.read(fixtures.RPS_FILE))
    (d,) = validate_repository(PolicyRepository.from_documents([rps]))
    assert d.kind is DiagnosticKind.DANGLING_REFERENCE
    assert d.node_id == "RPS:physician:role"
    assert d.position is not None


def test_reference_cycle_between_two_sets():
    a = PolicySetNode("A", CombiningAlg.PERMIT_OVERRIDES, children=(Reference("B"),))
    b = PolicySetNode("B", CombiningAlg.PERMIT_OVERRIDES, children=(Reference("A"),))
    diags = validate_repository(PolicyRepository.from_documents([a, b], roots=["A"]))
    assert [d.kind for d in diags] == [DiagnosticKind.REFERENCE_CYCLE]
    assert "A, B" in diags[0].message


def test_cycle_through_containment():
    inner = PolicySetNode("inner", CombiningAlg.PERMIT_OVERRIDES, children=(Reference("outer"),))
    outer = PolicySetNode("outer", CombiningAlg.PERMIT_OVERRIDES, children=(inner,))
    diags = validate_repository(PolicyRepository.from_documents([outer]))
    assert [d.kind for d in diags] == [DiagnosticKind.REFERENCE_CYCLE]


def test_self_reference_cycle():
    a = PolicySetNode("A", CombiningAlg.PERMIT_OVERRIDES, children=(Reference("A"),))
    diags = validate_repository(PolicyRepository.from_documents([a], roots=["A"]))
    assert [d.kind for d in diags] == [DiagnosticKind.REFERENCE_CYCLE]


def test_duplicate_ids_and_rule_ids():
    p = PolicyNode("P", CombiningAlg.PERMIT_OVERRIDES,
                   rules=(RuleNode("r", Effect.PERMIT), RuleNode("r", Effect.DENY)))
    a = PolicySetNode("A", CombiningAlg.PERMIT_OVERRIDES, children=(p,))
    b = PolicySetNode("A", CombiningAlg.PERMIT_OVERRIDES)
    kinds = sorted(d.kind.value for d in validate_repository(
        PolicyRepository.from_documents([a, b])))
    assert kinds == ["DuplicateId", "DuplicateRuleId"]


def test_reference_to_policy_is_dangling():
    p = PolicyNode("P", CombiningAlg.PERMIT_OVERRIDES)
    a = PolicySetNode("A", CombiningAlg.PERMIT_OVERRIDES, children=(p, Reference("P")))
    (d,) = validate_repository(PolicyRepository.from_documents([a]))
    assert d.kind is DiagnosticKind.DANGLING_REFERENCE


def test_unknown_root():
    a = PolicySetNode("A", CombiningAlg.PERMIT_OVERRIDES)
    (d,) = validate_repository(PolicyRepository.from_documents([a], roots=["A", "Z"]))
    assert d.kind is DiagnosticKind.UNKNOWN_ROOT


def test_document_order_does_not_change_semantics(physician_repo):
    flipped = PolicyRepository.from_documents(list(reversed(physician_repo.documents)))
    assert flipped.roots == physician_repo.roots
    assert validate_repository(flipped) == []


def test_positions_do_not_affect_equality():
    parsed = parse_policy_document(fixtures.read(fixtures.RPS_FILE))
    assert parsed.position == (1, 1)
    assert replace(parsed, position=None) == parsed
