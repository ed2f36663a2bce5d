"""Shared fixtures: cached steady-state runs for the two reference cases."""

import pytest

from enserr.fields import Grid2D
from enserr.harness import ensure_run
from enserr.interference import FlowCase, build_region_map

_CASES = {"EdneyI": FlowCase.crossing, "EdneyVI": FlowCase.merging}
_MAPS = {}


@pytest.fixture(scope="session")
def steady_run():
    """Callable (case_id, scheme, n=100) -> CachedRun, via the run cache.

    Uses the default cache root, so repeated test sessions and the
    experiment driver share one set of marches.
    """
    def get(case_id, scheme, n=100):
        case = _CASES[case_id]()
        if case_id not in _MAPS:
            _MAPS[case_id] = build_region_map(case)
        return ensure_run(case, Grid2D.unit_square(n, n), scheme,
                          rmap=_MAPS[case_id])
    return get
