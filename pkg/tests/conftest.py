import numpy as np
import pytest

from intermap.core import Alpha, GOLDEN

ALPHAS = {
    "1/3": Alpha.rational(1, 3),
    "1/5": Alpha.rational(1, 5),
    "golden": Alpha.from_float(GOLDEN),
}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=list(ALPHAS), ids=list(ALPHAS))
def alpha(request):
    return ALPHAS[request.param]


def dense_map_oracle(N, alpha_value):
    """Momentum-space map from explicit matrices: D_kin W D_alpha W^dagger."""
    p = np.arange(N)
    W = np.exp(2j * np.pi * np.outer(p, p) / N) / np.sqrt(N)
    D_kin = np.diag(np.exp(-2j * np.pi * p**2 / N))
    D_alpha = np.diag(np.exp(2j * np.pi * alpha_value * p))
    return D_kin @ W @ D_alpha @ W.conj().T


# -- acceptance report -----------------------------------------------------------

_ACCEPTANCE = {}


@pytest.fixture
def record():
    """``record(criterion, passed, detail)`` stores one line for the terminal summary."""

    def _record(criterion, passed, detail):
        prev = _ACCEPTANCE.get(criterion)
        ok = bool(passed) and (prev is None or prev[0])
        text = detail if prev is None else f"{prev[1]}; {detail}"
        _ACCEPTANCE[criterion] = (ok, text)
        return bool(passed)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_ACCEPTANCE):
        ok, text = _ACCEPTANCE[criterion]
        terminalreporter.write_line(f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {text}")
