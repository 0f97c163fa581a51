import os
import subprocess
import sys

import pytest

from conftest import _kernels_c


def backend_under(env_value):
    env = dict(os.environ)
    env.pop("ORDSCORE_PURE_PYTHON", None)
    if env_value is not None:
        env["ORDSCORE_PURE_PYTHON"] = env_value
    return subprocess.run([sys.executable, "-c", "import ordscore; print(ordscore.BACKEND)"],
                          env=env, capture_output=True, text=True, check=True).stdout.strip()


def test_forced_python():
    assert backend_under("1") == "python"


@pytest.mark.skipif(_kernels_c is None, reason="compiled kernels not built")
def test_compiled_by_default():
    assert backend_under(None) == "cython"
    assert backend_under("0") == "cython"


def test_same_api():
    from ordscore import _kernels_py
    if _kernels_c is None:
        pytest.skip("compiled kernels not built")
    public = {n for n in dir(_kernels_py) if not n.startswith("_") and callable(getattr(_kernels_py, n))}
    public -= {"annotations"}
    missing = {n for n in public if not hasattr(_kernels_c, n)}
    assert not missing
