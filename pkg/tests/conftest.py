import numpy as np
import pytest


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_psd(rng, n, ridge=0.1):
    x = rand_complex(rng, n, n)
    return x @ x.conj().T + ridge * np.eye(n)


def rand_unit_diag_psd(rng, n):
    r = rand_psd(rng, n)
    d = 1 / np.sqrt(np.real(np.diag(r)))
    r = d[:, None] * r * d[None, :]
    np.fill_diagonal(r, 1.0)
    return r


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# --- acceptance summary --------------------------------------------------------

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    name = item.name
    if not name.startswith("test_criterion_"):
        return
    label = name[len("test_criterion_"):]
    doc = (item.function.__doc__ or "").strip().splitlines()[0]
    entry = _CRITERIA.setdefault(label, {"doc": doc, "passed": True, "detail": ""})
    if report.failed:
        entry["passed"] = False
    if report.when == "call":
        entry["detail"] = dict(item.user_properties).get("detail", "")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: (int(s.rstrip("abc")), s)):
        e = _CRITERIA[label]
        tr.write_line(f"{'PASS' if e['passed'] else 'FAIL'}  criterion {label:<3} {e['doc']}")
        if e["detail"]:
            tr.write_line(f"      {e['detail']}")
