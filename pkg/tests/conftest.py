import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from ordscore import _kernels_py, glm
from ordscore.datasets import load_esoph

settings.register_profile("ordscore", deadline=None, max_examples=200)
settings.load_profile("ordscore")

try:
    from ordscore import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

KERNEL_BACKENDS = [pytest.param(_kernels_py, id="python")]
if _kernels_c is not None:
    KERNEL_BACKENDS.append(pytest.param(_kernels_c, id="cython"))


@pytest.fixture(params=KERNEL_BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture(autouse=True)
def irls_deviance_monotone(monkeypatch):
    """Every logistic fit in the suite must have a non-increasing deviance after step one."""
    original = glm.fit_logistic_grouped

    def checked(*args, **kwargs):
        result = original(*args, **kwargs)
        trace = np.array(result.deviance_trace[1:])
        assert np.all(np.diff(trace) <= 1e-8), f"IRLS deviance rose: {trace}"
        return result

    monkeypatch.setattr(glm, "fit_logistic_grouped", checked)
    yield


@pytest.fixture(scope="session")
def esoph():
    return load_esoph()


@pytest.fixture(scope="session")
def diamonds_csv():
    path = os.environ.get("ORDSCORE_DIAMONDS_CSV")
    if not path or not Path(path).is_file():
        pytest.skip("set ORDSCORE_DIAMONDS_CSV to the diamonds CSV to run this test")
    return path
