import pytest

_capman = None


def pytest_configure(config):
    global _capman
    _capman = config.pluginmanager.getplugin("capturemanager")


def terminal_line(text: str) -> None:
    """Print a line to the live terminal even while output capture is on."""
    if _capman is not None:
        with _capman.global_and_fixture_disabled():
            print(text, flush=True)
    else:
        print(text, flush=True)
