"""Serialization round-trips and CLI behaviour (exit codes, formats)."""
import json

import numpy as np
import pytest

from equivaria.cli import EXIT_INPUT, EXIT_OK, EXIT_VERIFICATION, main
from equivaria.datasets import bundled, dataset_names
from equivaria.groups import builtin_group
from equivaria.serialize import (
    ParseError,
    canonical_dumps,
    complex_array_from_json,
    complex_array_to_json,
    document_to_json,
    dumps_document,
    parse_document,
)
from equivaria.systems import z2_line_system


def test_complex_codec_roundtrip():
    rng = np.random.default_rng(0)
    arr = rng.standard_normal((2, 3, 3)) + 1j * rng.standard_normal((2, 3, 3))
    back = complex_array_from_json(complex_array_to_json(arr))
    assert np.abs(back - arr).max() < 1e-15


def test_group_roundtrip_byte_identical():
    for name in ("Z2", "S3", "D8"):
        g = builtin_group(name)
        text = dumps_document(g)
        g2 = parse_document(text)
        assert g2.order == g.order
        assert np.array_equal(g2.mul, g.mul)
        assert dumps_document(g2) == text


def test_system_roundtrip_byte_identical():
    for name in ("z2-line", "dihedral-plane", "anticomplete-point"):
        sys = bundled(name)
        text = dumps_document(sys)
        sys2 = parse_document(text)
        assert sys2.n_points == sys.n_points
        assert np.abs(sys2.cocycle - sys.cocycle).max() < 1e-15
        assert dumps_document(sys2) == text


def test_parse_reports_location():
    with pytest.raises(ParseError, match=r"line 3, column 1"):
        parse_document('{"kind": "system",\n  "oops"\n}')


def test_parse_rejects_bad_documents():
    with pytest.raises(ParseError):
        parse_document('{"kind": "starship"}')
    with pytest.raises(ParseError):
        parse_document('{"kind": "group", "builtin": "Monster"}')
    with pytest.raises(ParseError):
        parse_document('["not", "an", "object"]')


def test_system_with_reduction_extras():
    sys = z2_line_system(1)
    doc = document_to_json(sys)
    doc["wprime"] = [0]
    doc["r"] = [0, 1]
    parsed, extras = parse_document(canonical_dumps(doc))
    assert parsed.n_points == sys.n_points
    assert extras == {"wprime": [0], "r": [0, 1]}


def test_components_document():
    sys = z2_line_system(1)
    doc = {"schema": "equivaria/1", "kind": "components",
           "components": [{"system": document_to_json(sys),
                           "wprime": [0], "r": [0, 1]}]}
    comps = parse_document(canonical_dumps(doc))
    assert len(comps) == 1
    assert comps[0][1:] == ([0], [0, 1])


def test_cli_examples_lists_datasets(capsys):
    assert main(["examples", "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert {d["name"] for d in report["datasets"]} == set(dataset_names())


def test_cli_irreps_builtin(capsys):
    assert main(["irreps", "--input", "S3", "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert sorted(r["dim"] for r in report["irreps"]) == [1, 1, 2]


def test_cli_spectrum_bundled(capsys):
    assert main(["spectrum", "--input", "z2-line", "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["wedderburn"]["ok"]


def test_cli_morita_modes(capsys):
    assert main(["morita", "--input", "anticomplete-point",
                 "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["mode"] == "theorem" and report["strict_inclusion"]
    assert main(["morita", "--input", "two-component",
                 "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["mode"] == "toy-dual" and report["ok"]


def test_cli_verify_suites(capsys):
    assert main(["verify", "none"]) == EXIT_OK
    capsys.readouterr()
    assert main(["verify", "morita", "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] and len(report["checks"]) == 2


def test_cli_input_errors(tmp_path, capsys):
    assert main(["irreps", "--input", "no-such-thing"]) == EXIT_INPUT
    assert main(["irreps"]) == EXIT_INPUT
    assert main(["spectrum", "--input", "z2-line", "--tolerance", "-1"]) == EXIT_INPUT
    assert main(["spectrum", "--input", "S3"]) == EXIT_INPUT  # group, not system
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "system"}')
    assert main(["spectrum", "--input", str(bad)]) == EXIT_INPUT
    capsys.readouterr()


def test_cli_rejects_corrupted_cocycle(tmp_path, capsys):
    doc = document_to_json(z2_line_system(1))
    doc["cocycle"][1][0][0][0] = [3.0, 0.0]   # no longer unitary
    path = tmp_path / "corrupt.json"
    path.write_text(canonical_dumps(doc))
    assert main(["spectrum", "--input", str(path)]) == EXIT_INPUT
    capsys.readouterr()


def test_cli_roundtrip_file_input(tmp_path, capsys):
    path = tmp_path / "line.json"
    path.write_text(dumps_document(z2_line_system(1)))
    assert main(["spectrum", "--input", str(path), "--format", "text"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS" in out
