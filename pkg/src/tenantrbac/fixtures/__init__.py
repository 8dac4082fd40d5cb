"""The physician role/permission example as shipped policy documents.

``rps_physician_role.xml`` and ``pps_physician_role.xml`` are normalized
versions of the printed samples: URIs are joined back where typesetting
split them, and each ``Target`` is closed (empty) before the children that
follow it.  The ``*_printed.xml.txt`` files keep the printed text; the
permission sample is not well-formed XML as printed.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

RPS_FILE = "rps_physician_role.xml"
PPS_FILE = "pps_physician_role.xml"
RPS_VERBATIM = "rps_physician_printed.xml.txt"
PPS_VERBATIM = "pps_physician_printed.xml.txt"

PHYSICIAN_ROLE = "urn:example:rolevalues:physician"
OBLIGATION_TEXT = "only physicians can create prescriptions"


def path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(name)))


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def documents():
    from ..policy import parse_policy_document

    return [parse_policy_document(read(RPS_FILE)), parse_policy_document(read(PPS_FILE))]


def repository():
    from ..policy import PolicyRepository

    return PolicyRepository.from_documents(documents())
