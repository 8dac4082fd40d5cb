"""Minimal position-tracking XML reader built on :mod:`xml.parsers.expat`.

Only what the policy and request parsers need: elements, attributes and
character data, each element stamped with its 1-based line and column.
DTDs, entity declarations and processing instructions are refused.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.parsers import expat

from .errors import InvalidDocumentError, PolicyParseError, UnsupportedElementError, WellFormednessError

MAX_DEPTH = 128


@dataclass
class Element:
    namespace: str | None
    tag: str
    attrs: dict[str, str]
    line: int
    column: int
    children: list[Element] = field(default_factory=list)
    text_parts: list[str] = field(default_factory=list)

    @property
    def text(self) -> str:
        return "".join(self.text_parts)

    @property
    def position(self) -> tuple[int, int]:
        return (self.line, self.column)


def _split(name: str) -> tuple[str | None, str]:
    if " " in name:
        ns, local = name.split(" ", 1)
        return ns, local
    return None, name


def read(document: str | bytes) -> Element:
    """Parse ``document`` and return its root element.

    Every failure surfaces as a :class:`~tenantrbac.errors.PolicyParseError`
    subclass.
    """
    if not isinstance(document, (str, bytes, bytearray)):
        raise WellFormednessError(f"expected XML text, got {type(document).__name__}")
    parser = expat.ParserCreate(namespace_separator=" ")
    stack: list[Element] = []
    roots: list[Element] = []

    def here() -> tuple[int, int]:
        return parser.CurrentLineNumber, parser.CurrentColumnNumber + 1

    def start(name, attrs):
        line, col = here()
        if len(stack) >= MAX_DEPTH:
            raise InvalidDocumentError(f"elements nested deeper than {MAX_DEPTH}", line, col)
        ns, local = _split(name)
        el = Element(ns, local, dict(attrs), line, col)
        if stack:
            stack[-1].children.append(el)
        else:
            roots.append(el)
        stack.append(el)

    def end(name):
        stack.pop()

    def chars(data):
        if stack:
            stack[-1].text_parts.append(data)

    def doctype(*args):
        raise UnsupportedElementError("document type declarations are not supported", *here())

    def entity(*args):
        raise UnsupportedElementError("entity declarations are not supported", *here())

    def pi(target, data):
        raise UnsupportedElementError(f"processing instruction {target!r} is not supported",
                                      *here())

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.StartDoctypeDeclHandler = doctype
    parser.EntityDeclHandler = entity
    parser.UnparsedEntityDeclHandler = entity
    parser.ProcessingInstructionHandler = pi
    try:
        parser.Parse(document, True)
    except PolicyParseError:
        raise
    except expat.ExpatError as exc:
        raise WellFormednessError(expat.errors.messages.get(exc.code, str(exc)),
                                  exc.lineno, exc.offset + 1) from None
    except (ValueError, UnicodeError, LookupError) as exc:
        raise WellFormednessError(f"cannot decode document: {exc}") from None
    if not roots:
        raise WellFormednessError("document has no root element")
    return roots[0]
