import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile('default', max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile('default')


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.addinivalue_line('markers', 'criterion(number, name): acceptance criterion')
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker('criterion')
    if mark is None or rep.when != 'call' and not rep.failed:
        return
    number, name = mark.args
    key = (number, name)
    measured = dict(item.user_properties).get('measured', '')
    prev = item.config._criteria.get(key, ('PASS', ''))
    status = 'FAIL' if rep.failed or prev[0] == 'FAIL' else 'PASS'
    item.config._criteria[key] = (status, measured or prev[1])


def pytest_terminal_summary(terminalreporter, config):
    if not config._criteria:
        return
    terminalreporter.section('acceptance criteria')
    for (number, name), (status, measured) in sorted(config._criteria.items()):
        tail = f'  ({measured})' if measured else ''
        terminalreporter.write_line(f'criterion {number:2d} {name}: {status}{tail}')
