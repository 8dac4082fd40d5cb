import re

from tenantrbac.graph import to_dot
from tenantrbac.merge import merge_hierarchies
from tenantrbac.model import new_hierarchy


def _counts(dot):
    nodes = re.findall(r"^\s+\"[^\"]+\" \[label=", dot, re.M)
    edges = re.findall(r"^\s+\"[^\"]+\" -> \"[^\"]+\";", dot, re.M)
    clusters = re.findall(r"subgraph \"cluster_", dot)
    return len(nodes), len(edges), len(clusters)


def test_admin_graph(admin_merged):
    dot = to_dot(admin_merged)
    assert dot.startswith('digraph "roles" {')
    assert _counts(dot) == (4, 3, 1)
    assert '"T0:SystemAdministrator" -> "T0:A";' in dot


def test_one_cluster_per_tenant_and_shared_names_kept_apart():
    merged = merge_hierarchies([new_hierarchy("T0", ["admin", "clerk"], {("admin", "clerk")}),
                                new_hierarchy("T1", ["admin"])])
    dot = to_dot(merged)
    assert _counts(dot) == (3, 1, 2)
    assert '"T0:admin"' in dot and '"T1:admin"' in dot


def test_graph_is_deterministic(admin_merged):
    assert to_dot(admin_merged) == to_dot(admin_merged)
