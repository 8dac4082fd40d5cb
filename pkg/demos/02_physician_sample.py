"""Evaluate three requests against the shipped physician example policies.

The role policy set admits subjects holding the physician role; the
permission policy set permits creating prescriptions and denies anything
else through its trailing FinalRule.
"""

from __future__ import annotations

from tenantrbac import fixtures
from tenantrbac.errors import WellFormednessError
from tenantrbac.pdp import RequestContext, evaluate_request, parse_request
from tenantrbac.policy import parse_policy_document


def main() -> None:
    repo = fixtures.repository()
    request = parse_request(fixtures.read("request_physician_create.xml"))

    print("physician creates a prescription")
    print(evaluate_request(repo, request).format())

    print("physician deletes a prescription")
    delete = RequestContext.build("prescription", "delete", [fixtures.PHYSICIAN_ROLE])
    print(evaluate_request(repo, delete).format())

    print("nurse creates a prescription")
    nurse = RequestContext.build("prescription", "create", ["urn:example:rolevalues:nurse"])
    print(evaluate_request(repo, nurse).format())

    # The printed permission sample needs repair before it parses.
    try:
        parse_policy_document(fixtures.read(fixtures.PPS_VERBATIM))
    except WellFormednessError as exc:
        print("verbatim permission sample:", exc)


if __name__ == "__main__":
    main()
