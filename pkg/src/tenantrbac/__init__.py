"""Multi-tenant role-based access control with layered XACML policies.

Typical pipeline::

    merged = merge_hierarchies([h0, h1])
    repo = compile(merged, pa)
    decision = evaluate_request(repo, RequestContext.build(
        "T0/customerData", "read", enable_roles("alice", assignments)))
"""

from .compiler import (
    SINGLE_TENANT_SCHEME,
    DEFAULT_SCHEME,
    CompilationNamingScheme,
    compile,
    role_attribute_value,
)
from .errors import *  # noqa: F401,F403
from .merge import (
    MergedRoleSet,
    PrivilegeTemplate,
    instantiate_privilege,
    merge_hierarchies,
    reconstitute,
)
from .model import (
    BackstopPlacement,
    ObjectId,
    ParameterizedRole,
    Privilege,
    RoleHierarchy,
    RoleParam,
    dominates,
    effective_privileges,
    juniors_of,
    level_of,
    new_hierarchy,
)
from .pdp import (
    Decision,
    Outcome,
    RequestContext,
    apply_combining,
    enable_roles,
    evaluate_request,
    evaluate_rule,
    match_target,
    parse_request,
)
from .policy import (
    PolicyRepository,
    load_repository,
    parse_policy_document,
    serialize,
    validate_repository,
)

__version__ = "0.1.0"
