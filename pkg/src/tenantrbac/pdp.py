"""Policy decision point: evaluate requests against a policy repository.

Role-definition policy sets gate on the subject's role attribute and
reference permission policy sets, which reference their juniors' in turn.
A subject therefore presents only the roles it holds directly; inherited
privileges are reached through the reference chain.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Collection, Iterable, Mapping, Sequence

from . import _xml
from .errors import (
    InvalidDocumentError,
    InvalidRequestError,
    RepositoryInvalidError,
    UnknownRoleError,
    UnknownSubjectError,
    UnsupportedElementError,
)
from .policy import (
    ACTION_ID,
    RESOURCE_ID,
    XS_ANYURI,
    XS_STRING,
    Category,
    CombiningAlg,
    Effect,
    MatchNode,
    Obligation,
    PolicyNode,
    PolicyRepository,
    PolicySetNode,
    Reference,
    RuleNode,
    TargetNode,
)

REQUEST_NS = "urn:oasis:names:tc:xacml:1.0:context"


class Outcome(enum.Enum):
    PERMIT = "Permit"
    DENY = "Deny"
    NOT_APPLICABLE = "NotApplicable"
    INDETERMINATE = "Indeterminate"

    @classmethod
    def of(cls, effect: Effect) -> Outcome:
        return cls(effect.value)

    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self]

    def __str__(self) -> str:
        return self.value


_EXIT_CODES = {Outcome.PERMIT: 0, Outcome.DENY: 1,
               Outcome.NOT_APPLICABLE: 2, Outcome.INDETERMINATE: 3}


# -- requests ----------------------------------------------------------------

@dataclass(frozen=True)
class AttributeValue:
    value: str
    data_type: str = XS_STRING


@dataclass(frozen=True, eq=False)
class RequestContext:
    """Request attributes keyed by ``(category, attribute id)``.

    Values are multi-valued and typed.  ``resource-id`` and ``action-id``
    must each be present exactly once.
    """

    attributes: Mapping[tuple[Category, str], tuple[AttributeValue, ...]]

    def __post_init__(self):
        attrs = {k: tuple(v) for k, v in self.attributes.items()}
        object.__setattr__(self, "attributes", attrs)
        for key in ((Category.RESOURCE, RESOURCE_ID), (Category.ACTION, ACTION_ID)):
            values = attrs.get(key, ())
            if len(values) != 1:
                raise InvalidRequestError(
                    f"request needs exactly one {key[1]} value, got {len(values)}")

    def __eq__(self, other):
        if not isinstance(other, RequestContext):
            return NotImplemented
        return self.attributes == other.attributes

    __hash__ = None

    @classmethod
    def build(cls, resource: str, action: str, roles: Iterable[str] = (),
              role_attribute_id: str = "urn:oasis:names:tc:xacml:1.0:subject:role",
              ) -> RequestContext:
        attrs: dict[tuple[Category, str], tuple[AttributeValue, ...]] = {
            (Category.RESOURCE, RESOURCE_ID): (AttributeValue(resource),),
            (Category.ACTION, ACTION_ID): (AttributeValue(action),),
        }
        roles = tuple(roles)
        if roles:
            attrs[(Category.SUBJECT, role_attribute_id)] = tuple(
                AttributeValue(r, XS_ANYURI) for r in roles)
        return cls(attrs)

    def values(self, category: Category, attribute_id: str,
               data_type: str) -> list[str]:
        return [v.value for v in self.attributes.get((category, attribute_id), ())
                if v.data_type == data_type]

    @property
    def resource(self) -> str:
        return self.attributes[(Category.RESOURCE, RESOURCE_ID)][0].value

    @property
    def action(self) -> str:
        return self.attributes[(Category.ACTION, ACTION_ID)][0].value


def parse_request(text: str | bytes) -> RequestContext:
    """Parse an XACML 1.x context ``Request`` document.

    Supported: any number of ``Subject`` sections, one ``Resource`` carrying
    ``resource-id`` and one ``Action`` carrying ``action-id``; every
    ``Attribute`` holds one or more ``AttributeValue`` children.
    """
    root = _xml.read(text)
    if root.namespace != REQUEST_NS or root.tag != "Request":
        raise UnsupportedElementError(f"expected <Request> in {REQUEST_NS}", *root.position)
    allowed_ids = {"Subject": None, "Resource": RESOURCE_ID, "Action": ACTION_ID}
    attrs: dict[tuple[Category, str], list[AttributeValue]] = {}
    counts = {"Resource": 0, "Action": 0}
    for section in root.children:
        if section.namespace != REQUEST_NS or section.tag not in allowed_ids:
            raise UnsupportedElementError(f"<{section.tag}> is not supported in a request",
                                          *section.position)
        if section.attrs:
            raise UnsupportedElementError(f"<{section.tag}> takes no attributes",
                                          *section.position)
        if section.tag in counts:
            counts[section.tag] += 1
            if counts[section.tag] > 1:
                raise InvalidDocumentError(f"only one <{section.tag}> is allowed",
                                           *section.position)
        category = Category(section.tag)
        for attr in section.children:
            if attr.namespace != REQUEST_NS or attr.tag != "Attribute":
                raise UnsupportedElementError(f"<{attr.tag}> is not supported in a request",
                                              *attr.position)
            if set(attr.attrs) != {"AttributeId", "DataType"}:
                raise InvalidDocumentError("<Attribute> needs exactly AttributeId and DataType",
                                           *attr.position)
            attribute_id = "".join(attr.attrs["AttributeId"].split())
            data_type = "".join(attr.attrs["DataType"].split())
            if data_type not in (XS_STRING, XS_ANYURI):
                raise UnsupportedElementError(f"data type {data_type!r} is not supported",
                                              *attr.position)
            expected = allowed_ids[section.tag]
            if expected is not None and attribute_id != expected:
                raise UnsupportedElementError(
                    f"attribute {attribute_id!r} is not supported in <{section.tag}>",
                    *attr.position)
            if not attr.children or attr.text.strip():
                raise InvalidDocumentError("<Attribute> needs one or more <AttributeValue>",
                                           *attr.position)
            bag = attrs.setdefault((category, attribute_id), [])
            for v in attr.children:
                if v.namespace != REQUEST_NS or v.tag != "AttributeValue" or v.attrs \
                        or v.children:
                    raise UnsupportedElementError("expected a plain <AttributeValue>",
                                                  *v.position)
                text = "".join(v.text.split()) if data_type == XS_ANYURI else v.text.strip()
                bag.append(AttributeValue(text, data_type))
        if section.text.strip():
            raise InvalidDocumentError(f"<{section.tag}> must not contain text",
                                       *section.position)
    try:
        return RequestContext({k: tuple(v) for k, v in attrs.items()})
    except InvalidRequestError as exc:
        raise InvalidDocumentError(str(exc), *root.position) from None


# A literal carriage return would come back as a line feed.
_TEXT_ENTITIES = {"\r": "&#13;"}


def format_request(req: RequestContext) -> str:
    """Render ``req`` as a request document accepted by :func:`parse_request`."""
    from xml.sax.saxutils import escape, quoteattr

    lines = ['<?xml version="1.0" encoding="UTF-8"?>', f'<Request xmlns="{REQUEST_NS}">']
    for category in Category:
        entries = sorted((k[1], v) for k, v in req.attributes.items() if k[0] is category)
        if not entries and category is Category.SUBJECT:
            continue
        lines.append(f"  <{category.value}>")
        for attribute_id, values in entries:
            by_type: dict[str, list[str]] = {}
            for v in values:
                by_type.setdefault(v.data_type, []).append(v.value)
            for data_type, texts in by_type.items():
                lines.append(f"    <Attribute AttributeId={quoteattr(attribute_id)} "
                             f"DataType={quoteattr(data_type)}>")
                for t in texts:
                    lines.append(f"      <AttributeValue>{escape(t, _TEXT_ENTITIES)}</AttributeValue>")
                lines.append("    </Attribute>")
        lines.append(f"  </{category.value}>")
    lines.append("</Request>")
    return "\n".join(lines) + "\n"


# -- matching and combining --------------------------------------------------

class MatchResult(enum.Enum):
    MATCH = "Match"
    NO_MATCH = "NoMatch"


def _match_one(m: MatchNode, req: RequestContext) -> bool:
    d = m.designator
    return m.value in req.values(d.category, d.attribute_id, d.data_type)


def match_target(t: TargetNode | None, req: RequestContext) -> MatchResult:
    """Every present section needs one group whose matches all succeed.

    A designated attribute missing from the request makes its match fail.
    """
    if t is None:
        return MatchResult.MATCH
    for _, groups in t.sections():
        if groups is None:
            continue
        if not any(all(_match_one(m, req) for m in group) for group in groups):
            return MatchResult.NO_MATCH
    return MatchResult.MATCH


def evaluate_rule(r: RuleNode, req: RequestContext) -> Outcome:
    if match_target(r.target, req) is MatchResult.MATCH:
        return Outcome.of(r.effect)
    return Outcome.NOT_APPLICABLE


def _overrides(results: Sequence[Outcome], winner: Outcome, loser: Outcome) -> Outcome:
    if winner in results:
        return winner
    if Outcome.INDETERMINATE in results:
        return Outcome.INDETERMINATE
    if loser in results:
        return loser
    return Outcome.NOT_APPLICABLE


def apply_combining(alg: CombiningAlg, results: Iterable[Outcome]) -> Outcome:
    results = list(results)
    if alg is CombiningAlg.PERMIT_OVERRIDES:
        return _overrides(results, Outcome.PERMIT, Outcome.DENY)
    if alg is CombiningAlg.DENY_OVERRIDES:
        return _overrides(results, Outcome.DENY, Outcome.PERMIT)
    for r in results:
        if r is not Outcome.NOT_APPLICABLE:
            return r
    return Outcome.NOT_APPLICABLE


# -- evaluation --------------------------------------------------------------

@dataclass(frozen=True)
class TraceEntry:
    depth: int
    kind: str
    node_id: str
    outcome: Outcome

    def __str__(self) -> str:
        return f"{'  ' * self.depth}{self.kind} {self.node_id} -> {self.outcome}"


@dataclass(frozen=True)
class Decision:
    outcome: Outcome
    obligations: tuple[Obligation, ...] = ()
    trace: tuple[TraceEntry, ...] = field(default=(), compare=True)

    def format(self) -> str:
        """One line for the outcome, one per obligation, one per visited node."""
        lines = [f"Decision: {self.outcome}"]
        for ob in self.obligations:
            parts = "; ".join(f"{a.attribute_id}={a.value}" for a in ob.assignments)
            lines.append(f"Obligation: {ob.id} [{ob.fulfill_on}] {parts}".rstrip())
        lines.append("Trace:")
        lines.extend(f"  {e}" for e in self.trace)
        return "\n".join(lines) + "\n"


class _Evaluation:
    """State for one request: trace, visited policies and a per-node memo."""

    def __init__(self, repo: PolicyRepository, req: RequestContext):
        self.repo = repo
        self.req = req
        self.trace: list[TraceEntry] = []
        self.policies: list[tuple[PolicyNode, Outcome]] = []
        self.memo: dict[str, Outcome] = {}
        self.active: set[str] = set()

    def record(self, depth, kind, node_id, outcome):
        self.trace.append(TraceEntry(depth, kind, node_id, outcome))
        return outcome

    def _combine(self, alg, items, evaluate):
        results = []
        for item in items:
            out = evaluate(item)
            results.append(out)
            if alg is CombiningAlg.FIRST_APPLICABLE and out is not Outcome.NOT_APPLICABLE:
                break
        return apply_combining(alg, results)

    def policy(self, node: PolicyNode, depth: int) -> Outcome:
        slot = len(self.trace)
        self.record(depth, "Policy", node.id, Outcome.NOT_APPLICABLE)
        if match_target(node.target, self.req) is MatchResult.NO_MATCH:
            return Outcome.NOT_APPLICABLE

        def rule(r):
            return self.record(depth + 1, "Rule", r.id, evaluate_rule(r, self.req))

        out = self._combine(node.rule_combining_alg, node.rules, rule)
        self.trace[slot] = TraceEntry(depth, "Policy", node.id, out)
        self.policies.append((node, out))
        return out

    def policy_set(self, node: PolicySetNode, depth: int) -> Outcome:
        if node.id in self.memo:
            return self.record(depth, "PolicySet", node.id, self.memo[node.id])
        if node.id in self.active:
            return self.record(depth, "PolicySet", node.id, Outcome.INDETERMINATE)
        slot = len(self.trace)
        self.record(depth, "PolicySet", node.id, Outcome.NOT_APPLICABLE)
        if match_target(node.target, self.req) is MatchResult.NO_MATCH:
            self.memo[node.id] = Outcome.NOT_APPLICABLE
            return Outcome.NOT_APPLICABLE
        self.active.add(node.id)

        def child(c):
            if isinstance(c, PolicySetNode):
                return self.policy_set(c, depth + 1)
            if isinstance(c, PolicyNode):
                return self.policy(c, depth + 1)
            target = self.repo.resolve(c)
            if target is None:
                return self.record(depth + 1, "Reference", c.target_id, Outcome.INDETERMINATE)
            return self.policy_set(target, depth + 1)

        out = self._combine(node.combining_alg, node.children, child)
        self.active.discard(node.id)
        self.trace[slot] = TraceEntry(depth, "PolicySet", node.id, out)
        self.memo[node.id] = out
        return out

    def node(self, node, depth: int) -> Outcome:
        if isinstance(node, PolicyNode):
            return self.policy(node, depth)
        return self.policy_set(node, depth)


def evaluate_request(repo: PolicyRepository, req: RequestContext) -> Decision:
    """Evaluate every root, combining them with permit-overrides.

    Obligations come from each evaluated Policy whose own outcome matches
    the final one, filtered to those that fulfil on that outcome.

    Raises :class:`RepositoryInvalidError` if the repository has any
    diagnostics.
    """
    if repo.diagnostics:
        raise RepositoryInvalidError(repo.diagnostics)
    ev = _Evaluation(repo, req)
    entries = repo.entries
    results = [ev.node(entries[root], 0) for root in repo.roots]
    outcome = apply_combining(CombiningAlg.PERMIT_OVERRIDES, results)
    obligations: list[Obligation] = []
    seen: set[tuple[str, str]] = set()
    if outcome in (Outcome.PERMIT, Outcome.DENY):
        for policy, local in ev.policies:
            if local is not outcome:
                continue
            for ob in policy.obligations:
                key = (policy.id, ob.id)
                if Outcome.of(ob.fulfill_on) is outcome and key not in seen:
                    seen.add(key)
                    obligations.append(ob)
    return Decision(outcome, tuple(obligations), tuple(ev.trace))


def enable_roles(subject: str, assignments: Mapping[str, Collection],
                 scheme=None, merged=None) -> list[str]:
    """Role attribute values for the roles ``subject`` holds directly.

    No hierarchy expansion happens here.  When ``merged`` is given, every
    held role must belong to it.
    """
    from .compiler import DEFAULT_SCHEME, role_attribute_value

    scheme = scheme or DEFAULT_SCHEME
    if subject not in assignments:
        raise UnknownSubjectError(f"subject {subject!r} has no role assignment")
    roles = assignments[subject]
    if merged is not None:
        for role in roles:
            if role not in merged.roles:
                raise UnknownRoleError(f"subject {subject!r} holds unknown role {role}")
    return sorted(role_attribute_value(r, scheme) for r in roles)
