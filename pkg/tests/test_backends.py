import json
import os
import subprocess
import sys

import numpy as np
import pytest

from tricomi import _accel, _kernels

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")

PROBE = """
import json
import numpy as np
from tricomi import _accel, fundsol as fs, specfun
from tricomi.specfun import HypTriple
vals = [float(fs.eval_E_minus(fs.KernelSpec.make(1, -1.0), 0.2, -2.0)),
        complex(specfun.hyp2f1(HypTriple(0.3, 0.7, 1.9), 0.4 + 0.3j)).real,
        complex(specfun.hyp2f1(HypTriple(1/6, 1/6, 1.0), -4.0)).real,
        float(fs.eval_F_minus(2, np.array([0.1, 0.0]), -1.0))]
print(json.dumps({"backend": _accel.BACKEND, "values": vals}))
"""


def probe(disable):
    env = dict(os.environ)
    env.pop("TRICOMI_DISABLE_NUMBA", None)
    if disable:
        env["TRICOMI_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", PROBE], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_env_switch_selects_numpy_and_values_agree():
    fallback = probe(True)
    assert fallback["backend"] == "numpy"
    default = probe(False)
    assert default["backend"] == ("numba" if _accel.HAVE_NUMBA else "numpy")
    assert np.allclose(fallback["values"], default["values"], rtol=1e-13, atol=0)


@needs_numba
def test_power_series_backends_agree():
    rng = np.random.default_rng(0)
    coefs = (rng.normal(size=60) / np.arange(1, 61) ** 2).astype(complex)
    w = rng.uniform(-0.9, 0.9, 200) + 1j * rng.uniform(-0.3, 0.3, 200)
    ref = _kernels.NUMPY["power_series"](coefs, w, 1e-16)
    fast = _kernels.NUMBA["power_series"](coefs, w, 1e-16)
    for a, b in zip(ref, fast):
        assert np.allclose(a, b, rtol=1e-14, atol=1e-15)


@needs_numba
def test_taylor_path_backends_agree():
    n = 16
    p = np.full(n, 0.3 + 0j)
    f = np.full(n, 1.1 + 0j)
    df = np.full(n, 0.2 + 0j)
    target = np.linspace(0.3, 0.9, n) + 0.2j
    ref = _kernels.NUMPY["taylor_path"](0.3, 0.7, 1.9, p, f, df, target, 1e-17, 200)
    fast = _kernels.NUMBA["taylor_path"](0.3, 0.7, 1.9, p, f, df, target, 1e-17, 200)
    for a, b in zip(ref, fast):
        assert np.allclose(a, b, rtol=1e-13, atol=1e-15)


@needs_numba
@pytest.mark.parametrize("k", [0, 1, 3])
def test_bump_profile_backends_agree(k):
    from tricomi.bump import profile_polynomial

    s = np.linspace(-1.2, 1.2, 301)
    poly = np.array(profile_polynomial(k))
    ref = _kernels.NUMPY["bump_profile"](s, poly, k)
    fast = _kernels.NUMBA["bump_profile"](s, poly, k)
    assert np.allclose(ref, fast, rtol=1e-14, atol=1e-300)


def test_disable_flag_parsing(monkeypatch):
    import importlib

    monkeypatch.setenv("TRICOMI_DISABLE_NUMBA", "yes")
    module = importlib.reload(_accel)
    try:
        assert module.DISABLED and module.BACKEND == "numpy"
    finally:
        monkeypatch.delenv("TRICOMI_DISABLE_NUMBA")
        importlib.reload(_accel)
