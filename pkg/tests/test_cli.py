from __future__ import annotations

import csv
import io
import json
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from hopflck.cli import main
from hopflck.reports import classify_report_schema

SCHEMA_PATH = Path(__file__).resolve().parents[1] / "docs" / "classify_report.schema.json"
E2PI = repr(math.exp(2 * math.pi))


def run(argv):
    buf = io.StringIO()
    code = main(argv, stdout=buf)
    return code, buf.getvalue()


def classify(*argv):
    code, out = run(["classify", *argv])
    assert code == 0
    return json.loads(out)


def rows(text):
    return list(csv.reader(io.StringIO(text)))


# classify -------------------------------------------------------------------


def test_classify_elliptic_example():
    rep = classify("--alpha", "4", "--beta", "2")
    assert rep["elliptic"] is True
    m = rep["monodromy"]
    assert (m["m"], m["n"], m["monodromy_c"]) == (1, 2, 0)
    plane = [f for f in rep["foliations"] if f["foliation"] == "plane"]
    assert plane and plane[0]["leaf"]["kind"] == "CompactTorus"
    assert rep["orbifold"]["cone_orders"] == [1, 2]


def test_classify_regular_example():
    assert classify("--alpha", "2", "--beta", "2")["orbifold"]["regular"] is True
    assert classify("--alpha", "4", "--beta", "2")["orbifold"]["regular"] is False


def test_classify_irrational_log_ratio():
    rep = classify("--log-mod-ratio", "irr", "--log-mod-beta", "1", "--arg-alpha-pi", "0", "--arg-beta-pi", "0")
    plane = [f for f in rep["foliations"] if f["foliation"] == "plane"][0]["leaf"]
    assert plane["kind"] == "DenseIn3Torus" and plane["certified"]
    assert rep["elliptic"] is False and rep["monodromy"] is None
    assert rep["certified"] is True


def test_classify_floating_is_tagged():
    rep = classify("--alpha", "4", "--beta", "2")
    assert rep["certified"] is False
    assert any("within tolerance" in q for q in rep["qualifiers"])


def test_classify_schema_published_and_valid():
    published = json.loads(SCHEMA_PATH.read_text())
    assert published == classify_report_schema()
    for argv in (
        ["--alpha", "4", "--beta", "2"],
        ["--alpha", "2i", "--beta", "2", "--point", "0.3,0.6,0.2,0.5,-0.59"],
        ["--log-mod-ratio", "irr", "--log-mod-beta", "1", "--arg-alpha-pi", "1/3", "--arg-beta-pi", "irr"],
    ):
        jsonschema.validate(classify(*argv), published)


def test_classify_echoes_params_and_tolerances():
    rep = classify("--alpha", "4", "--beta", "2", "--rational-tol", "1e-7", "--max-denominator", "500", "--tol", "1e-5")
    assert rep["params"]["alpha"] == [4.0, 0.0] and rep["params"]["beta"] == [2.0, 0.0]
    tol = rep["tolerances"]
    assert tol["rational_tol"] == 1e-7 and tol["max_denominator"] == 500 and tol["residual_tol"] == 1e-5
    assert set(tol) == {"root_tol", "derivative_step", "residual_tol", "rational_tol", "max_denominator"}


def test_classify_field_order_is_stable():
    _, out = run(["classify", "--alpha", "4", "--beta", "2"])
    keys = list(json.loads(out))
    assert keys == list(classify_report_schema()["properties"])


# verify -----------------------------------------------------------------------


def test_verify_constant_h():
    code, out = run(["verify", "--alpha", "4", "--beta", "2", "--h", "const:2", "--samples", "40"])
    rep = json.loads(out)
    assert code == 0 and rep["vaisman"] is True and rep["lck_residual"] < 1e-6
    assert rep["passed"] is True
    assert {c["name"] for c in rep["checks"]} >= {"d_omega", "d_Omega_minus_omega_wedge_Omega", "lee_duality", "J_invariance"}


def test_verify_fourier_h():
    code, out = run(["verify", "--alpha", "4", "--beta", "2", "--h", "fourier:2,0,0.5", "--samples", "40"])
    rep = json.loads(out)
    assert code == 0 and rep["vaisman"] is False and rep["lck_residual"] < 1e-6


# leaf -------------------------------------------------------------------------


def test_leaf_anti_lee_winding_5_3():
    code, out = run(
        ["leaf", "--kind", "anti-lee", "--alpha", repr(math.exp(5)), "--beta", repr(math.exp(3)),
         "--point", "0,0.6,0,0.8,0", "--samples", "2001"]
    )
    assert code == 0
    table = rows(out)
    assert table[0] == ["t", "theta", "t1", "t2"]
    data = np.array(table[1:], dtype=float)
    t1, t2 = np.unwrap(data[:, 2]), np.unwrap(data[:, 3])
    turns1 = (t1[-1] - t1[0]) / (2 * math.pi)
    turns2 = (t2[-1] - t2[0]) / (2 * math.pi)
    assert round(abs(turns1)) == 5 and round(abs(turns2)) == 3
    assert abs(abs(turns1) - 5) < 1e-9 and abs(abs(turns2) - 3) < 1e-9
    # closed polyline
    assert np.allclose(np.exp(1j * data[0, 2:]), np.exp(1j * data[-1, 2:]), atol=1e-9)


def test_leaf_lee_closes_at_half():
    code, out = run(
        ["leaf", "--kind", "lee", "--alpha", E2PI, "--beta", E2PI, "--point", "0,1,0,0,0", "--samples", "5", "--t-max", "0.5"]
    )
    assert code == 0
    data = np.array(rows(out)[1:], dtype=float)
    assert data[-1, 0] == 0.5
    first, last = data[0, 1:], data[-1, 1:]
    assert np.allclose(np.exp(1j * first), np.exp(1j * last), atol=1e-12)
    # the theta coordinate passes through other values in between
    assert len({round(x % (2 * math.pi), 9) for x in data[:-1, 1]}) == 4


def test_leaf_kernel_marker():
    code, out = run(["leaf", "--kind", "kernel-lee", "--alpha", "4", "--beta", "2", "--format", "svg"])
    assert code == 0
    root = ET.fromstring(out)
    assert root.tag.endswith("svg")
    assert not any(el.tag.endswith("polyline") for el in root.iter())
    assert any("3-sphere slice" in (el.text or "") for el in root.iter())


@pytest.mark.parametrize("kind", ["lee", "anti-lee", "plane"])
@pytest.mark.parametrize("project", ["torus-angles", "stereo"])
def test_leaf_svg_is_xml(kind, project):
    code, out = run(
        ["leaf", "--kind", kind, "--alpha", "4", "--beta", "2", "--point", "0.3,0.6,0.2,0.5,-0.59",
         "--project", project, "--format", "svg", "--samples", "200"]
    )
    assert code == 0
    root = ET.fromstring(out)
    assert root.tag == "{http://www.w3.org/2000/svg}svg"
    assert sum(1 for el in root.iter() if el.tag.endswith(("polyline", "circle"))) > 0


def test_leaf_csv_locale_independent():
    code, out = run(["leaf", "--kind", "plane", "--alpha", "4", "--beta", "2", "--project", "stereo", "--samples", "30"])
    assert code == 0
    table = rows(out)
    assert table[0][:3] == ["t", "s", "theta"]
    for r in table[1:]:
        for cell in r:
            float(cell)
            assert "," not in cell


# fibrate ----------------------------------------------------------------------


def test_fibrate_axis_point():
    code, out = run(["fibrate", "--alpha", "4", "--beta", "2", "--point", "0.7,0,0.6,0,0"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("point [1.000000000000+0.000000000000i : 0.000000000000+0.000000000000i]")
    assert float(lines[1].split()[1]) == 0.0


def test_fibrate_random_point_spread():
    code, out = run(["fibrate", "--alpha", "2i", "--beta", "2", "--point", "1.1,0.3,-0.4,0.5,0.2"])
    assert code == 0
    assert float(out.splitlines()[1].split()[1]) < 1e-9
    assert out.splitlines()[2] == "monodromy m=4 n=4 c=1"


# solve-potential --------------------------------------------------------------


def test_solve_potential_constant():
    code, out = run(["solve-potential", "--h", "const:2", "--v0", "2"])
    assert code == 0
    table = rows(out)
    assert table[0] == ["theta", "L", "dL", "d2L", "residual", "status"]
    data = np.array([r[:5] for r in table[1:]], dtype=float)
    assert np.max(np.abs(data[:, 1] - 2 * data[:, 0])) < 1e-8


def test_solve_potential_fourier_residual():
    code, out = run(["solve-potential", "--h", "fourier:2,0.3,-0.4,0.1,0.2"])
    assert code == 0
    data = np.array([r[:5] for r in rows(out)[1:]], dtype=float)
    assert np.max(data[:, 4]) < 1e-8


def test_solve_potential_blowup_flag():
    code, out = run(["solve-potential", "--h", "const:2", "--v0", "1e-12"])
    assert code == 7
    table = rows(out)
    assert table[0][-1] == "status"
    assert table[-1][-1] == "blow-up"


# error paths ------------------------------------------------------------------

ERROR_CASES = [
    (["classify", "--alpha", "1", "--beta", "2"], 2),
    (["classify", "--alpha", "2", "--beta", "1"], 2),
    (["classify", "--alpha", "4"], 2),
    (["classify", "--alpha", "4", "--beta", "2", "--point", "0,0,0,0,0"], 2),
    (["classify", "--log-mod-ratio", "1/2", "--log-mod-beta", "1", "--arg-alpha-pi", "0", "--arg-beta-pi", "0"], 2),
    (["classify", "--alpha", "4", "--beta", "2", "--log-mod-ratio", "3", "--log-mod-beta", "1",
      "--arg-alpha-pi", "0", "--arg-beta-pi", "0"], 3),
    (["verify", "--alpha", "4", "--beta", "2", "--h", "const:-1"], 4),
    (["leaf", "--alpha", "4", "--beta", "2", "--project", "mercator"], 5),
    (["leaf", "--alpha", "4", "--beta", "2", "--point", "0,0,0,0"], 2),
    (["fibrate", "--log-mod-ratio", "irr", "--log-mod-beta", "1", "--arg-alpha-pi", "0", "--arg-beta-pi", "0"], 6),
    (["solve-potential", "--h", "const:2", "--v0", "1e-12"], 7),
]


@pytest.mark.parametrize("argv,code", ERROR_CASES)
def test_exit_codes(argv, code):
    assert run(argv)[0] == code


# determinism and output -------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--alpha", "2i", "--beta", "2"],
        ["leaf", "--kind", "plane", "--alpha", "4", "--beta", "2", "--format", "svg"],
        ["leaf", "--kind", "anti-lee", "--alpha", "3+1i", "--beta", "2", "--samples", "300"],
        ["verify", "--alpha", "4", "--beta", "2", "--samples", "20"],
        ["verify", "--alpha", "4", "--beta", "2", "--samples", "20", "--seedless"],
    ],
)
def test_byte_identical(argv):
    assert run(argv) == run(argv)


def test_output_file_and_dir_override(tmp_path, monkeypatch):
    target = tmp_path / "report.json"
    assert main(["classify", "--alpha", "4", "--beta", "2", "--output", str(target)]) == 0
    assert json.loads(target.read_text())["elliptic"] is True
    monkeypatch.setenv("HOPFLCK_OUTPUT_DIR", str(tmp_path))
    assert main(["leaf", "--alpha", "4", "--beta", "2", "-o", "leaf.csv"]) == 0
    assert (tmp_path / "leaf.csv").read_text().startswith("t,theta")
