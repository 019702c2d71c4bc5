import pytest

import support


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Every test gets a throwaway package cache; no test touches the user's."""
    cache_dir = tmp_path / "bbohub-cache"
    monkeypatch.setenv("BBOHUB_CACHE_DIR", str(cache_dir))
    monkeypatch.delenv("BBOHUB_REGISTRY_ROOT", raising=False)
    return cache_dir


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if support.ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, ok in support.ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
