import json
import math
import os
from pathlib import Path

import pytest

import pxsys

CONFIG_DIR = Path(os.environ.get("PXSYS_CONFIG_DIR", Path(__file__).resolve().parents[2] / "configs"))


def test_exponent_descriptors():
    assert pxsys.describe(pxsys.ConstantExponent(1.8)) == "constant 1.8"
    p = pxsys.SinusoidalExponent(1.6, 0.1, math.pi, 0.0)
    assert pxsys.evaluate_exponent(p, [0.5, 0.0]) == pytest.approx(1.7)
    assert pxsys.sobolev_conjugate(1.5, 2) == pytest.approx(6.0)


def test_series_limit():
    limit, sums = pxsys.series_limit(1.8, 2)
    assert limit == pytest.approx(10 / 9)
    assert abs(sums[-1] - limit) < 1e-12


def test_solve_single_1d():
    r = pxsys.solve_single(pxsys.ConstantExponent(2.0), resolution=41, dimension=1)
    assert r["converged"]
    for x, u in zip(r["x1"], r["u"]):
        assert u == pytest.approx(x * (1 - x) / 2, abs=1e-6)


def test_luxemburg_norm_constant():
    n = 101
    assert pxsys.luxemburg_norm([1.0] * n, pxsys.ConstantExponent(2.0), n, 1) == pytest.approx(1.0)


def test_config_errors_raise():
    with pytest.raises(pxsys.ConfigError, match="line 2"):
        pxsys.format_config("[grid]\nresolution = -3\n")


def test_validate_and_bad_alpha(tmp_path):
    ok = pxsys.run(CONFIG_DIR / "cooperative_catalog.cfg", tmp_path / "ok", mode="validate")
    assert ok["exit_code"] == pxsys.EXIT_OK
    assert ok["report"]["hypotheses"]["passed"]
    bad = pxsys.run(CONFIG_DIR / "cooperative_bad_alpha.cfg", tmp_path / "bad", mode="validate")
    assert bad["exit_code"] == pxsys.EXIT_HYPOTHESIS


def test_cooperative_run_coarse(tmp_path):
    r = pxsys.run(CONFIG_DIR / "cooperative_catalog.cfg", tmp_path, resolution=17)
    assert r["exit_code"] == pxsys.EXIT_OK
    names = sorted(Path(p).name for p in r["written"])
    assert names == ["fields.csv", "report.json", "trace.csv"]
    header = (tmp_path / "fields.csv").read_text().splitlines()[0]
    assert header == "x1,x2,u,v,d"
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["config"]["grid"]["resolution"] == [17, 17]
    assert report["box"]["verification"]["passed"]
