from hypothesis import settings

# first calls pay numba compilation time
settings.register_profile("sigmabias", deadline=None)
settings.load_profile("sigmabias")

# (criterion, passed, detail) appended by the acceptance tests
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for aid, ok, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0][1:])):
        terminalreporter.write_line(f"{aid} {'PASS' if ok else 'FAIL'}  {detail}")
