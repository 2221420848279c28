"""Input-document validation, subcommand output, and process exit codes."""

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from pinchtrace import SchemaError, bessel_j, c_weight, counting_direct, SpectralData
from pinchtrace.cli import main, parse_input


def _doc(**kw):
    base = {"version": 1}
    base.update(kw)
    return json.dumps(base).encode()


class TestParseInput:
    def test_length_spectrum_roundtrip(self):
        doc = parse_input(_doc(length_spectrum=[
            {"length": 2.0, "multiplicity": 1}, {"length": 1.0, "multiplicity": 3}]))
        assert doc.kind == "length_spectrum"
        assert doc.length_spectrum.entries == ((1.0, 3), (2.0, 1))

    def test_eigenvalues_roundtrip(self):
        doc = parse_input(_doc(
            eigenvalues=[{"lambda": 0.0, "multiplicity": 1}], volume=6.28))
        assert doc.kind == "eigenvalues"
        assert doc.spectral.volume == 6.28

    def test_pinching_roundtrip(self):
        doc = parse_input(_doc(pinching=[0.1, 0.2]))
        assert doc.pinching.ells == (0.1, 0.2)

    def test_schedule_roundtrip(self):
        doc = parse_input(_doc(schedule={
            "kind": "geometric", "start": 0.5, "ratio": 0.5, "count": 3}))
        assert len(doc.schedule.points()) == 3
        doc2 = parse_input(_doc(schedule={"kind": "explicit", "values": [[0.5], [0.2]]}))
        assert doc2.schedule.points()[1].ells == (0.2,)

    def test_version_required_and_checked(self):
        with pytest.raises(SchemaError, match="version"):
            parse_input(json.dumps({"pinching": [0.1]}).encode())
        with pytest.raises(SchemaError, match="version"):
            parse_input(_doc(version=2, pinching=[0.1]))

    def test_exactly_one_payload(self):
        with pytest.raises(SchemaError, match="multiple payloads"):
            parse_input(_doc(pinching=[0.1], eigenvalues=[
                {"lambda": 0.0, "multiplicity": 1}], volume=1.0))
        with pytest.raises(SchemaError, match="exactly one"):
            parse_input(_doc())

    def test_offending_field_is_named(self):
        with pytest.raises(SchemaError, match=r"pinching\[0\]"):
            parse_input(_doc(pinching=[-0.1]))
        with pytest.raises(SchemaError, match=r"length_spectrum\[1\]\.length"):
            parse_input(_doc(length_spectrum=[
                {"length": 1.0, "multiplicity": 1},
                {"length": -2.0, "multiplicity": 1}]))
        with pytest.raises(SchemaError, match=r"eigenvalues\[0\]\.multiplicity"):
            parse_input(_doc(eigenvalues=[{"lambda": 0.0, "multiplicity": 0}],
                             volume=1.0))

    def test_unknown_fields_rejected(self):
        with pytest.raises(SchemaError, match="extra"):
            parse_input(_doc(pinching=[0.1], extra=1))
        with pytest.raises(SchemaError, match=r"policy\.bogus"):
            parse_input(_doc(pinching=[0.1], policy={"bogus": 1.0}))

    def test_volume_pairing(self):
        with pytest.raises(SchemaError, match="volume"):
            parse_input(_doc(eigenvalues=[{"lambda": 0.0, "multiplicity": 1}]))
        with pytest.raises(SchemaError, match="volume"):
            parse_input(_doc(pinching=[0.1], volume=1.0))

    def test_nonfinite_rejected(self):
        with pytest.raises(SchemaError):
            parse_input(b'{"version": 1, "pinching": [1e999]}')

    def test_malformed_json(self):
        with pytest.raises(SchemaError, match="malformed"):
            parse_input(b"{not json")
        with pytest.raises(SchemaError, match="object"):
            parse_input(b"[1, 2]")

    def test_policy_override_carried(self):
        doc = parse_input(_doc(pinching=[0.1], policy={"rel_tol": 1e-6}))
        assert doc.policy == {"rel_tol": 1e-6}


def _run_main(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def _csv_rows(out):
    return list(csv.reader(io.StringIO(out)))


class TestMainInProcess:
    def test_bessel_matches_library(self, capsys):
        code, out = _run_main(["bessel", "--p", "0.5", "--x", "2.0"], capsys)
        assert code == 0
        rows = _csv_rows(out)
        assert rows[0] == ["p", "x", "value"]
        assert float(rows[1][2]) == pytest.approx(bessel_j(0.5, 2.0), rel=1e-15)

    def test_cweight_matches_library(self, capsys):
        code, out = _run_main(["cweight", "--w", "1", "--T", "1.25"], capsys)
        assert code == 0
        assert float(_csv_rows(out)[1][2]) == pytest.approx(
            c_weight(1.0, 1.25), rel=1e-15)

    def test_count_matches_library(self, tmp_path, capsys):
        f = tmp_path / "eig.json"
        f.write_text(json.dumps({
            "version": 1,
            "eigenvalues": [{"lambda": 0.0, "multiplicity": 1},
                            {"lambda": 0.2, "multiplicity": 1}],
            "volume": 1.0}))
        code, out = _run_main(
            ["count", "--input", str(f), "--w", "1", "--T", "1"], capsys)
        assert code == 0
        sd = SpectralData.of([(0.0, 1), (0.2, 1)])
        assert float(_csv_rows(out)[1][2]) == counting_direct(sd, 1.0, 1.0)

    def test_json_format(self, capsys):
        code, out = _run_main(
            ["balance", "--f-ell", "0.01", "--log-sum", "4", "--format", "json"],
            capsys)
        assert code == 0
        rows = json.loads(out)
        assert rows[0]["epsilon"] == pytest.approx(0.05, rel=1e-15)

    def test_print_config_merges_precedence(self, tmp_path, capsys):
        f = tmp_path / "p.json"
        f.write_text(json.dumps({
            "version": 1, "pinching": [0.1],
            "policy": {"rel_tol": 1e-5, "abs_tol": 1e-12}}))
        code, out = _run_main(
            ["gfunc", "--input", str(f), "--w", "0", "--T", "1",
             "--rel-tol", "1e-3", "--print-config"], capsys)
        assert code == 0
        cfg = json.loads(out)
        # flag beats document override; document override beats default
        assert cfg["policy"]["rel_tol"] == 1e-3
        assert cfg["policy"]["abs_tol"] == 1e-12
        assert cfg["policy"]["max_terms"] == 100_000_000

    def test_bad_document_exits_one(self, tmp_path, capsys):
        f = tmp_path / "bad.json"
        f.write_text(json.dumps({"version": 1, "pinching": [-0.5]}))
        code = main(["dtrace", "--input", str(f), "--t", "1"])
        err = capsys.readouterr().err
        assert code == 1
        assert "pinching[0]" in err

    def test_domain_error_exits_one(self, capsys):
        assert main(["heatkernel", "--t", "-1"]) == 1

    def test_nonconvergence_exits_two(self, capsys):
        assert main(["cylinder", "--ell", "0.05", "--t", "1",
                     "--max-terms", "1"]) == 2

    def test_wrong_payload_kind_exits_one(self, tmp_path, capsys):
        f = tmp_path / "p.json"
        f.write_text(json.dumps({"version": 1, "pinching": [0.1]}))
        assert main(["count", "--input", str(f), "--w", "1", "--T", "1"]) == 1

    def test_missing_file_exits_one(self, capsys):
        assert main(["dtrace", "--input", "/nonexistent.json", "--t", "1"]) == 1

    def test_sweep_header_contract(self, tmp_path, capsys):
        f = tmp_path / "s.json"
        f.write_text(json.dumps({
            "version": 1,
            "schedule": {"kind": "explicit", "values": [[0.5], [0.25]]}}))
        code, out = _run_main(
            ["sweep", "--input", str(f), "--w", "0", "--T", "1"], capsys)
        assert code == 0
        rows = _csv_rows(out)
        assert rows[0] == ["ell_sup", "log_sum", "g_value", "residual", "normalized"]
        assert len(rows) == 3
        assert float(rows[1][0]) == 0.5

    def test_sweep_failed_rows_emit_nan_and_stderr(self, tmp_path, capsys):
        f = tmp_path / "s.json"
        f.write_text(json.dumps({
            "version": 1,
            "schedule": {"kind": "explicit", "values": [[0.5]]},
            "policy": {"max_terms": 1}}))
        code = main(["sweep", "--input", str(f), "--w", "0", "--T", "1"])
        captured = capsys.readouterr()
        assert code == 0
        row = _csv_rows(captured.out)[1]
        assert row[2] == "nan"
        assert "failed" in captured.err

    def test_trace_complex_columns(self, tmp_path, capsys):
        f = tmp_path / "ls.json"
        f.write_text(json.dumps({
            "version": 1,
            "length_spectrum": [{"length": 1.0, "multiplicity": 1}]}))
        code, out = _run_main(
            ["trace", "--input", str(f), "--t", "1", "--s", "0.5"], capsys)
        assert code == 0
        rows = _csv_rows(out)
        assert rows[0] == ["t", "s", "htr_re", "htr_im"]


class TestSubprocess:
    CMD = [sys.executable, "-m", "pinchtrace"]

    def test_usage_error_is_64(self):
        proc = subprocess.run(self.CMD + ["frobnicate"], capture_output=True)
        assert proc.returncode == 64
        proc = subprocess.run(self.CMD, capture_output=True)
        assert proc.returncode == 64

    def test_entry_point_happy_path(self):
        proc = subprocess.run(
            self.CMD + ["cweight", "--w", "0", "--T", "1.25"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        val = float(proc.stdout.splitlines()[1].split(",")[2])
        assert val == pytest.approx(1.0 / math.pi, rel=1e-14)

    def test_validation_failure_is_1(self, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text('{"version": 1, "pinching": []}')
        proc = subprocess.run(
            self.CMD + ["dtrace", "--input", str(f), "--t", "1"],
            capture_output=True, text=True)
        assert proc.returncode == 1
        assert "pinching" in proc.stderr
