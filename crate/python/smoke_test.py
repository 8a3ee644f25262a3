"""Smoke test for the mirrorlab Python extension.

Build first with `cargo build --release -p mirrorlab-py`, then run
`pytest python/`. Set MIRRORLAB_PY_LIB to point at a specific shared library.
"""

import importlib.util
import json
import os
import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent


def _find_library():
    env = os.environ.get("MIRRORLAB_PY_LIB")
    if env:
        return Path(env)
    names = ["libmirrorlab_py.so", "libmirrorlab_py.dylib", "mirrorlab_py.dll"]
    for profile in ("release", "debug"):
        for name in names:
            p = ROOT / "target" / profile / name
            if p.exists():
                return p
    return None


def _load():
    lib = _find_library()
    if lib is None:
        pytest.skip("extension not built; run cargo build --release -p mirrorlab-py")
    suffix = ".pyd" if sys.platform == "win32" else ".so"
    tmp = Path(tempfile.mkdtemp(prefix="mirrorlab_py_"))
    target = tmp / ("mirrorlab_py" + suffix)
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("mirrorlab_py", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.fixture(scope="module")
def ml():
    return _load()


def test_lattice(ml):
    assert ml.norm_form(1, 1) == 3
    assert ml.norm_form(2, -1) == 3
    assert Fraction(ml.kappa("1", "0")) < 0
    assert sorted(ml.coset_reps(1)) == [(0, 0)]
    assert len(ml.coset_reps(3)) == 9


def test_series_arithmetic(ml):
    a = ml.TauSeries([("0", "1"), ("1", "2")], "5")
    b = ml.TauSeries([("1", "1")], "5")
    prod = a * b
    assert Fraction(prod.coeff("2")) == 2
    assert Fraction(prod.coeff("1")) == 1
    assert abs(prod.eval(0.1) - (0.1 + 2 * 0.01)) < 1e-15
    assert (a + b).terms() == [("0", "1"), ("1", "3")]


def test_theta_sections(ml):
    s = ml.ThetaSection(0, 0, 1, "6")
    coeffs = s.coeffs()
    assert Fraction(coeffs[(0, 0)].coeff("0")) == 1
    value, err = s.evaluate(1.0, 1.0, 0.1)
    assert value > 1.0 and err < 1e-4
    json.dumps(s.to_json())


def test_functor_and_mu2(ml):
    rep = ml.functor_check(0, 1, 2, "10")
    assert rep["all_match"] is True
    m = ml.mu2(0, 1, 2, (0, 0), (0, 0), "10")
    assert m


def test_tropical(ml):
    value, maxi = ml.trop_phi("0", "0")
    assert Fraction(value) == 0 and maxi == [(0, 0)]
    assert ml.tile_of("1/10", "0") == (0, 0)
    assert ml.render_svg("-1", "-1", "1", "1").startswith("<svg")


def test_disc_series_matches_theta(ml):
    a = ("1/3", "-1/4", "5/2")
    assert ml.disc_series(a, "8") == ml.theta_at_moment(a, "8")


def test_sphere_count(ml):
    c = ml.sphere_count_c("4", 9)
    assert Fraction(c.coeff("0")) == 1
    assert Fraction(c.coeff("2")) == 6
    assert Fraction(c.coeff("3")) == -12


def test_differential_and_leibniz(ml):
    t = ml.differential_table(0, 2, "10")
    assert t["entries"]
    r = ml.leibniz_check(0, 2, (1.0, 1.0), 0.1, "15")
    assert r["status"] == "pass"


def test_metric(ml):
    center = (40 / 3, 40 / 3, 40 / 3)
    m = ml.metric(center)
    assert m["positive_definite"] is True
    assert ml.region(center) == "VII"
    f = ml.transport_fractions(center)
    assert abs(sum(f) - 1.0) < 1e-14
    assert ml.monodromy_class("-3/4", "-3/4") == (0, 0)


def test_charts(ml):
    s = ml.chart_transition_str("0,0,0", "0,0,1")
    assert s.startswith("(")


def test_cli_run(ml):
    code, out = ml.run(["sphere-c"])
    assert code == 0
    assert json.loads(out)["status"] == "pass"
    code, _ = ml.run(["no-such-command"])
    assert code == 64
