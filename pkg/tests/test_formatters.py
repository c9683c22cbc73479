import re
from xml.etree import ElementTree

import numpy as np
import pytest

from wcport.checks.report import VerificationReport
from wcport.errors import ValidationError
from wcport.factors.paths import PathBundle
from wcport.formatters.csv_output import PathBundleCsv, ReportCsv, SurfaceCsv, atomic_write
from wcport.formatters.svg import REFERENCE_COLOR, Series, SvgOutput, SvgStyle, emit_svg
from wcport.solvers.surface import SpaceGrid, ValueSurface, policy_surface


SVG_NS = "{http://www.w3.org/2000/svg}"


def _series_styles(svg):
    """Line style of every series group, in drawing order."""
    root = ElementTree.fromstring(svg.encode("utf-8"))
    styles = []
    for group in root.iter(f"{SVG_NS}g"):
        if group.get("id", "").startswith("series-"):
            styles.append(group.find(f"{SVG_NS}path").get("style"))
    return styles


def test_svg_has_one_line_per_series():
    xs = [0.0, 1.0, 2.0]
    svg = emit_svg([Series("a", xs, [0.0, 1.0, 0.5]), Series("b", xs, [1.0, 1.0, 2.0], dashed=True)])
    assert svg.startswith('<?xml version="1.0"')
    assert svg.rstrip().endswith("</svg>")
    styles = _series_styles(svg)
    assert len(styles) == 2
    assert "stroke-dasharray" not in styles[0]
    assert "stroke-dasharray" in styles[1]
    assert REFERENCE_COLOR in styles[1]


def test_svg_constant_series_is_padded():
    svg = emit_svg([Series("flat", [0.0, 1.0], [2.0, 2.0])], SvgStyle(title="flat"))
    assert re.search(r"\bnan\b", svg) is None
    assert ">flat</text>" in svg


def test_svg_is_deterministic_and_escaped():
    series = [Series("x < y & z", np.linspace(0, 1, 5), np.linspace(0, 1, 5) ** 2)]
    assert emit_svg(series) == emit_svg(series)
    assert "x &lt; y &amp; z" in emit_svg(series)


def test_svg_rejects_empty_input():
    with pytest.raises(ValidationError):
        emit_svg([])
    with pytest.raises(ValidationError):
        emit_svg([Series("empty", [], [])])


def test_svg_output_writes_file(tmp_path):
    target = tmp_path / "plot.svg"
    SvgOutput(SvgStyle(width=4.0, height=2.5)).save([Series("a", [0, 1], [0, 1])], target)
    text = target.read_text(encoding="utf-8")
    assert 'width="288pt"' in text
    assert 'height="180pt"' in text


def test_path_bundle_csv(tmp_path):
    bundle = PathBundle(np.array([0.0, 0.5, 1.0]), np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]), seed=0)
    target = tmp_path / "paths.csv"
    PathBundleCsv().save(bundle, target)
    assert target.read_text(encoding="utf-8").splitlines() == [
        "t,path0,path1",
        "0.0,1.0,4.0",
        "0.5,2.0,5.0",
        "1.0,3.0,6.0",
    ]


def test_surface_csv_is_time_major(tmp_path):
    grid = SpaceGrid(0.0, 1.0, 2)
    surface = ValueSurface(np.array([0.0, 1.0]), grid, np.array([[3.0, 2.0, 1.0], [0.0, 0.0, 0.0]]))
    target = tmp_path / "v.csv"
    SurfaceCsv("v").save(surface, target)
    data = np.loadtxt(target, delimiter=",", skiprows=1)
    assert target.read_text(encoding="utf-8").splitlines()[0] == "t,x,v"
    np.testing.assert_array_equal(data[:, 0], [0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
    np.testing.assert_array_equal(data[:, 1], [0.0, 0.5, 1.0, 0.0, 0.5, 1.0])
    np.testing.assert_array_equal(data[:3, 2], [3.0, 2.0, 1.0])

    SurfaceCsv("pi").save(policy_surface(surface, 0.5), tmp_path / "pi.csv")
    assert (tmp_path / "pi.csv").read_text(encoding="utf-8").startswith("t,x,pi\n")


def test_report_csv_concatenates_reports(tmp_path):
    first = VerificationReport("one")
    first.add(0.0, 0.0, 1.0)
    second = VerificationReport("two")
    second.add(1.0, 5.0, 1.0, label="slack")
    target = tmp_path / "report.csv"
    ReportCsv().save([first, second], target)
    assert target.read_text(encoding="utf-8").splitlines() == [
        "check,checkpoint,estimate,se,pass",
        "one,0.0,0.0,1.0,true",
        "two,slack,5.0,1.0,false",
    ]


def test_atomic_write_leaves_no_temporary_files(tmp_path):
    target = tmp_path / "sub" / "out.txt"
    atomic_write(target, "first\n")
    atomic_write(target, "second\n")
    assert target.read_text(encoding="utf-8") == "second\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.txt"]
