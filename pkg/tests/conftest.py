import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from stabilizer_codes import BUILTIN_CODES, builtin  # noqa: E402


@pytest.fixture(params=list(BUILTIN_CODES))
def any_builtin(request):
    """Each built-in code in turn."""
    return builtin(request.param)


@pytest.fixture
def steane():
    return builtin("steane7")


@pytest.fixture
def shor():
    return builtin("shor9")


@pytest.fixture
def bitflip():
    return builtin("bitflip3")


@pytest.fixture
def seed():
    return 1234567
