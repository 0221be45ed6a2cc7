import pytest

_RESULTS_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS_KEY] = {}


@pytest.fixture
def criterion(request):
    """Record ``(passed, detail)`` for a numbered acceptance criterion."""
    results = request.config.stash[_RESULTS_KEY]

    def record(number, title, passed, detail):
        results[number] = (title, bool(passed), detail)
        print(f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, passed, detail = results[number]
        terminalreporter.write_line(
            f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        )
    passed = sum(1 for _, ok, _ in results.values() if ok)
    terminalreporter.write_line(f"{passed}/{len(results)} criteria passed")
