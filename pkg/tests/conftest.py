import sys
import warnings
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from quanto_mc.models import ModelSpec, ScParams, SerParams, SvParams  # noqa: E402
from quanto_mc.engine import MarketSnapshot  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "data" / "fixtures"

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def frozen_model(rho=0.0, sigma_fx=0.0, case="case1", theta=0.04, r_f=0.0, r_d=0.0):
    """Frozen variance, constant correlation, GBM FX."""
    sv = SvParams("Heston", kappa=1.0, theta=theta, sigma=0.0)
    sc = ScParams("Constant", rho_const=rho)
    ser = SerParams("Gbm", sigma_fx=sigma_fx, r_f=r_f, r_d=r_d)
    return ModelSpec.uniform(sv, sc, ser, case)


def frozen_market(rho=0.0, strikes=(100.0, 100.0), s0=(100.0, 100.0), fx0=(1.0,), v=0.04,
                  r_d=0.0, r_f=(0.0,), case="case1"):
    n = len(s0)
    return MarketSnapshot(case, s0, fx0, (v,) * n, rho, r_d, r_f, strikes)


@pytest.fixture
def fixture_paths():
    return {n.upper(): FIXTURES / f"{n}.csv" for n in ("sp500", "ftse100", "stoxx600", "gbpusd", "eurusd")}


@pytest.fixture(autouse=True)
def _quiet_feller():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=UserWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
