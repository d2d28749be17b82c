import pytest

from resurlab.precision import set_precision, DEFAULT_PRECISION_BITS


@pytest.fixture(autouse=True)
def default_precision():
    old = set_precision(DEFAULT_PRECISION_BITS)
    yield
    set_precision(old)
