import pytest

from wcport.config import SolverConfig
from wcport.console import set_quiet
from wcport.presets import model_a, model_b, model_c, model_d, model_ko


@pytest.fixture(autouse=True)
def quiet_console():
    set_quiet(True)
    yield
    set_quiet(False)


@pytest.fixture
def small_solver():
    return SolverConfig(n_t=200, n_x=60)


@pytest.fixture
def frozen_c():
    return model_c().frozen()


@pytest.fixture(params=["a", "b", "c", "d", "ko"])
def preset(request):
    return {"a": model_a, "b": model_b, "c": model_c, "d": model_d, "ko": model_ko}[request.param]()
