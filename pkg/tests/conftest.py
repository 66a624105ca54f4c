import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from chiralpotts import ModelParams, assemble_simultaneous, build_hamiltonian, build_translation  # noqa: E402


@pytest.fixture(scope="session")
def solved():
    """Cached (params, bundle, T, sector-route report) per (N, L, lambda)."""
    cache = {}

    def get(n, length, lam=0.5):
        key = (n, length, float(lam))
        if key not in cache:
            params = ModelParams(n, length, lam)
            bundle = build_hamiltonian(params)
            t = build_translation(params)
            cache[key] = (params, bundle, t, assemble_simultaneous(params, bundle, t))
        return cache[key]

    return get


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results, key=lambda k: int(k.split()[0][1:])):
        passed, detail = results[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {key}: {detail}")
