import pytest

from cechain.sigchain import ApIdentity, ChainContext, KeyMaterial, build_message, sign


@pytest.fixture(scope="session")
def keys():
    return KeyMaterial.generate(b"test-ap")


@pytest.fixture(scope="session")
def message():
    return build_message(ApIdentity.from_str("AA:BB:CC:DD:EE:FF"), 1_700_000_000)


@pytest.fixture(scope="session")
def signature(message, keys):
    return sign(message, keys)


@pytest.fixture
def ctx():
    return ChainContext(channel=6, last_seq=1234)


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion; returns the verdict."""

    def report(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
