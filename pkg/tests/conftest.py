import pytest

from tenantrbac import fixtures, merge_hierarchies, new_hierarchy

ACCEPTANCE_RESULTS: list[tuple[int, str, bool, str]] = []


@pytest.fixture
def admin_tree():
    """Four roles: a System Administrator over three subordinates."""
    return new_hierarchy("T0", ["SystemAdministrator", "A", "B", "C"],
                         {("SystemAdministrator", "A"), ("SystemAdministrator", "B"),
                          ("SystemAdministrator", "C")})


@pytest.fixture
def admin_merged(admin_tree):
    return merge_hierarchies([admin_tree])


@pytest.fixture
def physician_repo():
    return fixtures.repository()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE_RESULTS):
        mark = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{mark}] {number}. {title}: {detail}")
