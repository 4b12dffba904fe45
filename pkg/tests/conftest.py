import pytest

from lzcomm import _backend, _pykernels

EXAMPLE_STRING = "abaababaabaabaabaabaabb"

BACKENDS = {"python": _pykernels}
try:
    from lzcomm import _kernels

    BACKENDS["cython"] = _kernels
except ImportError:  # extension not built
    pass


@pytest.fixture(params=sorted(BACKENDS))
def backend(request, monkeypatch):
    """Run the test once per available kernel backend."""
    monkeypatch.setattr(_backend, "kernels", BACKENDS[request.param])
    return request.param


@pytest.fixture
def example_string():
    return EXAMPLE_STRING


def run_over_socket(kind, alice_fact, bob_fact, config):
    """Run both parties on a loopback TCP connection, Bob in a thread."""
    import threading

    from lzcomm.protocol import Speaker, transport

    run = transport.run_lcp_party if kind == "lcp" else transport.run_hamming_party
    ready = threading.Event()
    port = []
    outcome = {}

    def alice():
        sock = transport.listen(0, on_ready=lambda p: (port.append(p), ready.set()))
        with sock:
            outcome["alice"] = run(Speaker.ALICE, alice_fact, sock, config)

    thread = threading.Thread(target=alice)
    thread.start()
    assert ready.wait(10)
    with transport.connect("127.0.0.1", port[0]) as sock:
        outcome["bob"] = run(Speaker.BOB, bob_fact, sock, config)
    thread.join(30)
    return outcome["alice"], outcome["bob"]


# criterion number -> (verdict, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        verdict, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {verdict}  {detail}")
