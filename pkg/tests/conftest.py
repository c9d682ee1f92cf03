import os

import pytest

from cfinvar.config import set_config
from cfinvar.fixtures import mod2_chain_model, xor_counterexample_model

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')


@pytest.fixture(autouse=True)
def default_config(monkeypatch):
    monkeypatch.delenv('CFINVAR_RESPONSE_LIMIT', raising=False)
    monkeypatch.delenv('CFINVAR_FUNCTION_LIMIT', raising=False)
    set_config(None)
    yield
    set_config(None)


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def xor_model():
    return xor_counterexample_model()


@pytest.fixture
def mod2_model():
    return mod2_chain_model()
