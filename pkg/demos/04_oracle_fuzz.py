"""Check the compiled policies against a brute-force oracle on random instances.

For every generated instance, every (subject, object, mode) request goes
through merge, compile and the decision point, and the result must equal
the oracle's answer computed directly from the hierarchies.
"""

from __future__ import annotations

import sys

from tenantrbac.model import BackstopPlacement
from tenantrbac.oracle import FULL_BOUNDS, Bounds, find_divergences, isolation_violations, random_instance


def main(seeds: int = 50) -> int:
    requests = divergences = violations = 0
    for seed in range(seeds):
        inst = random_instance(seed, FULL_BOUNDS)
        requests += sum(1 for _ in inst.requests())
        divergences += len(find_divergences(inst))
        divergences += len(find_divergences(inst, placement=BackstopPlacement.EVERY_ROLE))
        scoped = random_instance(seed, Bounds(), tenant_scoped=True)
        violations += len(isolation_violations(scoped))
    print(f"{seeds} seeds, {requests} requests per placement")
    print(f"divergences: {divergences}")
    print(f"isolation violations: {violations}")
    return 1 if divergences or violations else 0


if __name__ == "__main__":
    sys.exit(main(int(sys.argv[1]) if len(sys.argv) > 1 else 50))
