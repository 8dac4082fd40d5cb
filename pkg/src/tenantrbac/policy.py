"""Document model, parser, serializer and validator for a strict XACML 1.x subset.

The supported surface is what role-definition and permission policy sets
need: ``PolicySet``, ``Policy``, ``Rule``, ``Target`` with subject,
resource and action matches, ``PolicySetIdReference`` and ``Obligations``.
Anything else in a document is an error; an access-control engine must not
silently skip policy text it does not understand.
"""

from __future__ import annotations

import enum
import os
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Union

from . import _xml
from .errors import (
    InvalidDocumentError,
    PolicyParseError,
    TypeMismatchError,
    UnknownCombiningAlgError,
    UnsupportedElementError,
)

POLICY_NS = "urn:oasis:names:tc:xacml:1.0:policy"

XS_STRING = "http://www.w3.org/2001/XMLSchema#string"
XS_ANYURI = "http://www.w3.org/2001/XMLSchema#anyURI"
DATA_TYPES = (XS_STRING, XS_ANYURI)

SUBJECT_ROLE = "urn:oasis:names:tc:xacml:1.0:subject:role"
RESOURCE_ID = "urn:oasis:names:tc:xacml:1.0:resource:resource-id"
ACTION_ID = "urn:oasis:names:tc:xacml:1.0:action:action-id"

_POLICY_ALG_PREFIX = "urn:oasis:names:tc:xacml:1.0:policy-combining-algorithm:"
_RULE_ALG_PREFIX = "urn:oasis:names:tc:xacml:1.0:rule-combining-algorithm:"


class Effect(enum.Enum):
    PERMIT = "Permit"
    DENY = "Deny"

    def __str__(self) -> str:
        return self.value


class CombiningAlg(enum.Enum):
    PERMIT_OVERRIDES = "permit-overrides"
    DENY_OVERRIDES = "deny-overrides"
    FIRST_APPLICABLE = "first-applicable"

    @property
    def policy_uri(self) -> str:
        return _POLICY_ALG_PREFIX + self.value

    @property
    def rule_uri(self) -> str:
        return _RULE_ALG_PREFIX + self.value

    @classmethod
    def from_uri(cls, uri: str, prefix: str) -> CombiningAlg:
        if uri.startswith(prefix):
            try:
                return cls(uri[len(prefix):])
            except ValueError:
                pass
        raise KeyError(uri)

    def __str__(self) -> str:
        return self.value


class MatchFunction(enum.Enum):
    STRING_EQUAL = "urn:oasis:names:tc:xacml:1.0:function:string-equal"
    ANYURI_EQUAL = "urn:oasis:names:tc:xacml:1.0:function:anyURI-equal"

    @property
    def data_type(self) -> str:
        return XS_STRING if self is MatchFunction.STRING_EQUAL else XS_ANYURI


class Category(enum.Enum):
    SUBJECT = "Subject"
    RESOURCE = "Resource"
    ACTION = "Action"

    def __str__(self) -> str:
        return self.value.lower()


Position = Union[tuple[int, int], None]


def _pos():
    return field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class AttributeDesignator:
    category: Category
    attribute_id: str
    data_type: str
    position: Position = _pos()


@dataclass(frozen=True)
class MatchNode:
    match_fn: MatchFunction
    value: str
    data_type: str
    designator: AttributeDesignator
    position: Position = _pos()

    def __post_init__(self):
        if self.data_type != self.match_fn.data_type:
            raise TypeMismatchError(
                f"{self.match_fn.name.lower()} requires {self.match_fn.data_type} literals, "
                f"got {self.data_type}", *(self.position or (None, None)))
        if self.designator.data_type != self.data_type:
            raise TypeMismatchError(
                f"designator {self.designator.attribute_id} has type "
                f"{self.designator.data_type}, literal has {self.data_type}",
                *(self.position or (None, None)))


#: A disjunction of conjunctions of matches.
MatchGroups = tuple[tuple[MatchNode, ...], ...]


@dataclass(frozen=True)
class TargetNode:
    """``None`` sections match everything; present sections are non-empty."""

    subjects: MatchGroups | None = None
    resources: MatchGroups | None = None
    actions: MatchGroups | None = None
    position: Position = _pos()

    def sections(self) -> Iterator[tuple[Category, MatchGroups | None]]:
        yield Category.SUBJECT, self.subjects
        yield Category.RESOURCE, self.resources
        yield Category.ACTION, self.actions

    @property
    def is_empty(self) -> bool:
        return self.subjects is None and self.resources is None and self.actions is None


@dataclass(frozen=True)
class RuleNode:
    id: str
    effect: Effect
    target: TargetNode | None = None
    position: Position = _pos()


@dataclass(frozen=True)
class AttributeAssignment:
    attribute_id: str
    data_type: str
    value: str


@dataclass(frozen=True)
class Obligation:
    id: str
    fulfill_on: Effect
    assignments: tuple[AttributeAssignment, ...] = ()
    position: Position = _pos()


@dataclass(frozen=True)
class PolicyNode:
    id: str
    rule_combining_alg: CombiningAlg
    target: TargetNode = TargetNode()
    rules: tuple[RuleNode, ...] = ()
    obligations: tuple[Obligation, ...] = ()
    position: Position = _pos()


@dataclass(frozen=True)
class Reference:
    target_id: str
    position: Position = _pos()


@dataclass(frozen=True)
class PolicySetNode:
    id: str
    combining_alg: CombiningAlg
    target: TargetNode = TargetNode()
    children: tuple[Union[PolicySetNode, PolicyNode, Reference], ...] = ()
    position: Position = _pos()


Node = Union[PolicySetNode, PolicyNode]


# -- parsing ---------------------------------------------------------------

def _squeeze(text: str) -> str:
    """URIs cannot contain whitespace; drop any left by line wrapping."""
    return "".join(text.split())


def _literal(text: str, data_type: str) -> str:
    return _squeeze(text) if data_type == XS_ANYURI else text.strip()


def _check_element(el: _xml.Element, tag: str | None = None) -> None:
    if el.namespace != POLICY_NS:
        ns = el.namespace or "no namespace"
        raise UnsupportedElementError(
            f"element <{el.tag}> in {ns} is not supported; expected namespace {POLICY_NS}",
            el.line, el.column)
    if tag is not None and el.tag != tag:
        raise UnsupportedElementError(f"expected <{tag}>, found <{el.tag}>", el.line, el.column)


def _attrs(el: _xml.Element, required: Iterable[str], optional: Iterable[str] = ()) -> dict:
    required = tuple(required)
    allowed = set(required) | set(optional)
    for name in el.attrs:
        if name not in allowed:
            shown = name.replace(" ", ":")
            raise UnsupportedElementError(f"attribute {shown!r} is not supported on <{el.tag}>",
                                          el.line, el.column)
    for name in required:
        if name not in el.attrs:
            raise InvalidDocumentError(f"<{el.tag}> is missing attribute {name!r}",
                                       el.line, el.column)
    return el.attrs


def _no_text(el: _xml.Element) -> None:
    if el.text.strip():
        raise InvalidDocumentError(f"<{el.tag}> must not contain text", el.line, el.column)


def _leaf_text(el: _xml.Element) -> str:
    if el.children:
        child = el.children[0]
        raise UnsupportedElementError(f"<{child.tag}> is not allowed inside <{el.tag}>",
                                      child.line, child.column)
    return el.text


def _children(el: _xml.Element, grammar: list[tuple[str, int, int | None]]) -> dict:
    """Match children against an ordered list of ``(tag, min, max)``."""
    _no_text(el)
    found: dict[str, list[_xml.Element]] = {tag: [] for tag, _, _ in grammar}
    slot = 0
    for child in el.children:
        _check_element(child)
        while slot < len(grammar) and grammar[slot][0] != child.tag:
            tag, lo, _ = grammar[slot]
            if len(found[tag]) < lo:
                raise InvalidDocumentError(f"<{el.tag}> requires <{tag}> before <{child.tag}>",
                                           child.line, child.column)
            slot += 1
        if slot == len(grammar):
            if child.tag in found:
                raise InvalidDocumentError(f"<{child.tag}> is out of order inside <{el.tag}>",
                                           child.line, child.column)
            raise UnsupportedElementError(f"<{child.tag}> is not supported inside <{el.tag}>",
                                          child.line, child.column)
        tag, _, hi = grammar[slot]
        if hi is not None and len(found[tag]) >= hi:
            raise InvalidDocumentError(f"<{el.tag}> allows at most {hi} <{tag}>",
                                       child.line, child.column)
        found[tag].append(child)
    for tag, lo, _ in grammar[slot:]:
        if len(found[tag]) < lo:
            raise InvalidDocumentError(f"<{el.tag}> requires at least {lo} <{tag}>",
                                       el.line, el.column)
    return found


def _data_type(el: _xml.Element, raw: str) -> str:
    dt = _squeeze(raw)
    if dt not in DATA_TYPES:
        raise UnsupportedElementError(f"data type {dt!r} is not supported", el.line, el.column)
    return dt


def _parse_match(el: _xml.Element, category: Category) -> MatchNode:
    attrs = _attrs(el, ["MatchId"])
    fn_uri = _squeeze(attrs["MatchId"])
    try:
        fn = MatchFunction(fn_uri)
    except ValueError:
        raise UnsupportedElementError(f"match function {fn_uri!r} is not supported",
                                      el.line, el.column) from None
    kids = _children(el, [("AttributeValue", 1, 1),
                          (f"{category.value}AttributeDesignator", 1, 1)])
    val_el = kids["AttributeValue"][0]
    data_type = _data_type(val_el, _attrs(val_el, ["DataType"])["DataType"])
    value = _literal(_leaf_text(val_el), data_type)
    des_el = kids[f"{category.value}AttributeDesignator"][0]
    des_attrs = _attrs(des_el, ["AttributeId", "DataType"])
    _leaf_text(des_el)
    _no_text(des_el)
    attribute_id = _squeeze(des_attrs["AttributeId"])
    if not attribute_id:
        raise InvalidDocumentError("AttributeId must be non-empty", des_el.line, des_el.column)
    designator = AttributeDesignator(category, attribute_id,
                                     _data_type(des_el, des_attrs["DataType"]),
                                     position=des_el.position)
    return MatchNode(fn, value, data_type, designator, position=el.position)


def _parse_section(el: _xml.Element, category: Category) -> MatchGroups:
    _attrs(el, [])
    single = category.value
    groups = []
    for item in _children(el, [(single, 1, None)])[single]:
        _attrs(item, [])
        matches = _children(item, [(f"{single}Match", 1, None)])[f"{single}Match"]
        groups.append(tuple(_parse_match(m, category) for m in matches))
    return tuple(groups)


def _parse_target(el: _xml.Element) -> TargetNode:
    _attrs(el, [])
    kids = _children(el, [("Subjects", 0, 1), ("Resources", 0, 1), ("Actions", 0, 1)])
    sections = {}
    for category in Category:
        found = kids[f"{category.value}s"]
        sections[category] = _parse_section(found[0], category) if found else None
    return TargetNode(sections[Category.SUBJECT], sections[Category.RESOURCE],
                      sections[Category.ACTION], position=el.position)


def _ident(el: _xml.Element, raw: str, what: str) -> str:
    value = raw.strip()
    if not value:
        raise InvalidDocumentError(f"{what} must be non-empty", el.line, el.column)
    return value


def _effect(el: _xml.Element, raw: str) -> Effect:
    try:
        return Effect(raw.strip())
    except ValueError:
        raise InvalidDocumentError(f"effect {raw!r} must be Permit or Deny",
                                   el.line, el.column) from None


def _combining(el: _xml.Element, raw: str, prefix: str) -> CombiningAlg:
    uri = _squeeze(raw)
    try:
        return CombiningAlg.from_uri(uri, prefix)
    except KeyError:
        raise UnknownCombiningAlgError(f"unknown combining algorithm {uri!r}",
                                       el.line, el.column) from None


def _parse_rule(el: _xml.Element) -> RuleNode:
    attrs = _attrs(el, ["RuleId", "Effect"])
    kids = _children(el, [("Target", 0, 1)])
    target = _parse_target(kids["Target"][0]) if kids["Target"] else None
    return RuleNode(_ident(el, attrs["RuleId"], "RuleId"), _effect(el, attrs["Effect"]),
                    target, position=el.position)


def _parse_obligation(el: _xml.Element) -> Obligation:
    attrs = _attrs(el, ["ObligationId", "FulfillOn"])
    assignments = []
    for a in _children(el, [("AttributeAssignment", 0, None)])["AttributeAssignment"]:
        a_attrs = _attrs(a, ["AttributeId", "DataType"])
        data_type = _data_type(a, a_attrs["DataType"])
        assignments.append(AttributeAssignment(_squeeze(a_attrs["AttributeId"]), data_type,
                                               _literal(_leaf_text(a), data_type)))
    return Obligation(_squeeze(attrs["ObligationId"]), _effect(el, attrs["FulfillOn"]),
                      tuple(assignments), position=el.position)


def _parse_policy(el: _xml.Element) -> PolicyNode:
    attrs = _attrs(el, ["PolicyId", "RuleCombiningAlgId"])
    kids = _children(el, [("Target", 0, 1), ("Rule", 0, None), ("Obligations", 0, 1)])
    target = _parse_target(kids["Target"][0]) if kids["Target"] else TargetNode()
    obligations: tuple[Obligation, ...] = ()
    if kids["Obligations"]:
        ob_el = kids["Obligations"][0]
        _attrs(ob_el, [])
        obligations = tuple(_parse_obligation(o) for o in
                            _children(ob_el, [("Obligation", 1, None)])["Obligation"])
    return PolicyNode(_ident(el, attrs["PolicyId"], "PolicyId"),
                      _combining(el, attrs["RuleCombiningAlgId"], _RULE_ALG_PREFIX),
                      target, tuple(_parse_rule(r) for r in kids["Rule"]), obligations,
                      position=el.position)


def _parse_policy_set(el: _xml.Element) -> PolicySetNode:
    attrs = _attrs(el, ["PolicySetId", "PolicyCombiningAlgId"])
    _no_text(el)
    target = TargetNode()
    children = []
    for i, child in enumerate(el.children):
        _check_element(child)
        if child.tag == "Target":
            if i != 0:
                raise InvalidDocumentError("<Target> must be the first child of <PolicySet>",
                                           child.line, child.column)
            target = _parse_target(child)
        elif child.tag == "PolicySet":
            children.append(_parse_policy_set(child))
        elif child.tag == "Policy":
            children.append(_parse_policy(child))
        elif child.tag == "PolicySetIdReference":
            _attrs(child, [])
            children.append(Reference(_ident(child, _leaf_text(child), "reference"),
                                      position=child.position))
        else:
            raise UnsupportedElementError(f"<{child.tag}> is not supported inside <PolicySet>",
                                          child.line, child.column)
    return PolicySetNode(_ident(el, attrs["PolicySetId"], "PolicySetId"),
                         _combining(el, attrs["PolicyCombiningAlgId"], _POLICY_ALG_PREFIX),
                         target, tuple(children), position=el.position)


def parse_policy_document(text: str | bytes) -> PolicySetNode:
    """Parse one policy document whose root element is a ``PolicySet``.

    Whitespace inside URI-valued attributes and ``anyURI`` literals is
    removed, so URIs wrapped across lines still compare equal.  String
    literals and identifiers are stripped at both ends.

    Raises a :class:`~tenantrbac.errors.PolicyParseError` subclass carrying
    the offending element's line and column.
    """
    root = _xml.read(text)
    _check_element(root, "PolicySet")
    return _parse_policy_set(root)


# -- serialization -----------------------------------------------------------

def _target_el(parent: ET.Element, target: TargetNode) -> None:
    el = ET.SubElement(parent, "Target")
    for category, groups in target.sections():
        if groups is None:
            continue
        section = ET.SubElement(el, f"{category.value}s")
        for group in groups:
            item = ET.SubElement(section, category.value)
            for m in group:
                match = ET.SubElement(item, f"{category.value}Match", MatchId=m.match_fn.value)
                value = ET.SubElement(match, "AttributeValue", DataType=m.data_type)
                value.text = m.value
                ET.SubElement(match, f"{category.value}AttributeDesignator",
                              AttributeId=m.designator.attribute_id,
                              DataType=m.designator.data_type)


def _policy_el(parent: ET.Element, node: PolicyNode) -> None:
    el = ET.SubElement(parent, "Policy", PolicyId=node.id,
                       RuleCombiningAlgId=node.rule_combining_alg.rule_uri)
    _target_el(el, node.target)
    for rule in node.rules:
        r = ET.SubElement(el, "Rule", RuleId=rule.id, Effect=rule.effect.value)
        if rule.target is not None:
            _target_el(r, rule.target)
    if node.obligations:
        obs = ET.SubElement(el, "Obligations")
        for ob in node.obligations:
            o = ET.SubElement(obs, "Obligation", ObligationId=ob.id,
                              FulfillOn=ob.fulfill_on.value)
            for a in ob.assignments:
                ET.SubElement(o, "AttributeAssignment", AttributeId=a.attribute_id,
                              DataType=a.data_type).text = a.value


def _policy_set_el(parent: ET.Element | None, node: PolicySetNode) -> ET.Element:
    attrs = {"PolicySetId": node.id, "PolicyCombiningAlgId": node.combining_alg.policy_uri}
    if parent is None:
        el = ET.Element("PolicySet", {"xmlns": POLICY_NS, **attrs})
    else:
        el = ET.SubElement(parent, "PolicySet", attrs)
    _target_el(el, node.target)
    for child in node.children:
        if isinstance(child, PolicySetNode):
            _policy_set_el(el, child)
        elif isinstance(child, PolicyNode):
            _policy_el(el, child)
        else:
            ET.SubElement(el, "PolicySetIdReference").text = child.target_id
    return el


def serialize(node: PolicySetNode) -> str:
    """Render ``node`` as a deterministic, indented XML document."""
    root = _policy_set_el(None, node)
    ET.indent(root, "  ")
    # ElementTree writes carriage returns raw; a reader would turn them into line feeds.
    body = ET.tostring(root, encoding="unicode").replace("\r", "&#13;")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


# -- repositories ------------------------------------------------------------

class DiagnosticKind(enum.Enum):
    DANGLING_REFERENCE = "DanglingReference"
    REFERENCE_CYCLE = "ReferenceCycle"
    DUPLICATE_ID = "DuplicateId"
    DUPLICATE_RULE_ID = "DuplicateRuleId"
    UNKNOWN_ROOT = "UnknownRoot"
    PARSE_ERROR = "ParseError"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Diagnostic:
    kind: DiagnosticKind
    node_id: str
    message: str
    position: Position = None
    source: str | None = None

    def __str__(self) -> str:
        where = self.source or ""
        if self.position is not None:
            where += f":{self.position[0]}:{self.position[1]}" if where else \
                f"line {self.position[0]}, column {self.position[1]}"
        prefix = f"{where}: " if where else ""
        return f"{prefix}{self.kind} [{self.node_id}] {self.message}"


def walk(node: Node) -> Iterator[Node]:
    """Yield ``node`` and every nested PolicySet and Policy, depth first."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, PolicySetNode):
            stack.extend(c for c in reversed(n.children) if not isinstance(c, Reference))


def references_in(node: PolicySetNode) -> Iterator[Reference]:
    return (c for c in node.children if isinstance(c, Reference))


@dataclass(frozen=True, eq=False)
class PolicyRepository:
    """Policy documents keyed by id plus the ids evaluation starts from.

    Construction never fails; use :func:`validate_repository` to find
    duplicate ids, dangling references and reference cycles.
    """

    documents: tuple[Node, ...]
    roots: tuple[str, ...]

    @classmethod
    def from_documents(cls, documents: Iterable[Node],
                       roots: Iterable[str] | None = None) -> PolicyRepository:
        """Build a repository; by default the roots are the unreferenced documents."""
        docs = tuple(documents)
        if roots is None:
            referenced = {ref.target_id for d in docs for n in walk(d)
                          if isinstance(n, PolicySetNode) for ref in references_in(n)}
            roots = sorted({d.id for d in docs} - referenced)
        return cls(docs, tuple(roots))

    @property
    def entries(self) -> dict[str, Node]:
        out: dict[str, Node] = {}
        for d in self.documents:
            out.setdefault(d.id, d)
        return out

    @cached_property
    def index(self) -> dict[str, Node]:
        """Every PolicySet and Policy, nested or not, by id (first occurrence wins)."""
        out: dict[str, Node] = {}
        for d in self.documents:
            for n in walk(d):
                out.setdefault(n.id, n)
        return out

    def resolve(self, ref: Reference) -> PolicySetNode | None:
        node = self.index.get(ref.target_id)
        return node if isinstance(node, PolicySetNode) else None

    @cached_property
    def diagnostics(self) -> tuple[Diagnostic, ...]:
        return tuple(validate_repository(self))


def _cycles(graph: dict[str, list[str]]) -> list[list[str]]:
    """Strongly connected components that contain a cycle (iterative Tarjan)."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out = []
    counter = 0
    for start in sorted(graph):
        if start in index:
            continue
        work = [(start, iter(graph[start]))]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in graph:
                    continue
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(graph[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1 or v in graph[v]:
                    out.append(sorted(comp))
    return sorted(out)


def validate_repository(repo: PolicyRepository) -> list[Diagnostic]:
    """Return one diagnostic per structural defect; empty means the repository is sound."""
    diags: list[Diagnostic] = []
    seen: Counter[str] = Counter()
    graph: dict[str, list[str]] = {}
    for doc in repo.documents:
        for n in walk(doc):
            seen[n.id] += 1
            if seen[n.id] == 2:
                diags.append(Diagnostic(DiagnosticKind.DUPLICATE_ID, n.id,
                                        "identifier is used by more than one policy node",
                                        n.position))
            if isinstance(n, PolicyNode):
                rule_ids = Counter(r.id for r in n.rules)
                for r in n.rules:
                    if rule_ids[r.id] > 1:
                        rule_ids[r.id] = 0
                        diags.append(Diagnostic(DiagnosticKind.DUPLICATE_RULE_ID, n.id,
                                                f"rule id {r.id!r} is repeated", r.position))
                continue
            edges = graph.setdefault(n.id, [])
            for child in n.children:
                if isinstance(child, PolicySetNode):
                    edges.append(child.id)
                elif isinstance(child, Reference):
                    target = repo.index.get(child.target_id)
                    if target is None:
                        diags.append(Diagnostic(DiagnosticKind.DANGLING_REFERENCE, n.id,
                                                f"reference to unknown PolicySet "
                                                f"{child.target_id!r}", child.position))
                    elif not isinstance(target, PolicySetNode):
                        diags.append(Diagnostic(DiagnosticKind.DANGLING_REFERENCE, n.id,
                                                f"reference {child.target_id!r} names a "
                                                f"Policy, not a PolicySet", child.position))
                    else:
                        edges.append(child.target_id)
    for comp in _cycles(graph):
        first = repo.index[comp[0]]
        diags.append(Diagnostic(DiagnosticKind.REFERENCE_CYCLE, comp[0],
                                "reference cycle through " + ", ".join(comp), first.position))
    top_level = {d.id for d in repo.documents}
    for root in repo.roots:
        if root not in top_level:
            diags.append(Diagnostic(DiagnosticKind.UNKNOWN_ROOT, root,
                                    "root id names no top-level policy document"))
    return diags


def parse_error_diagnostic(exc: PolicyParseError, source: str | None = None) -> Diagnostic:
    return Diagnostic(DiagnosticKind.PARSE_ERROR, exc.kind, exc.message, exc.position, source)


def load_documents(directory: str | os.PathLike) -> tuple[list[PolicySetNode], list[Diagnostic]]:
    """Parse every ``*.xml`` file in ``directory``.

    Returns the parsed documents and one diagnostic per file that failed.
    Files are read in sorted order, but since references bind by id the
    order carries no meaning.
    """
    docs, errors = [], []
    for path in sorted(Path(directory).glob("*.xml")):
        try:
            docs.append(parse_policy_document(path.read_bytes()))
        except PolicyParseError as exc:
            errors.append(parse_error_diagnostic(exc, str(path)))
    return docs, errors


def load_repository(directory: str | os.PathLike) -> PolicyRepository:
    """Load a directory of policy files, raising on the first parse failure."""
    docs, errors = load_documents(directory)
    if errors:
        d = errors[0]
        raise PolicyParseError(str(d), *(d.position or (None, None)))
    return PolicyRepository.from_documents(docs)
