import json

import pytest

from modjac import cli, hyperelliptic as hy, modsym, periods, pipeline
from modjac.errors import PrecisionLoss
from modjac.exact import RationalPolynomial as P

F63 = P([81, 0, 0, 162, 0, 0, -3])


@pytest.fixture(autouse=True)
def _no_env_cache(monkeypatch):
    monkeypatch.delenv(pipeline.CACHE_ENV, raising=False)


@pytest.fixture(scope="module")
def records63():
    return pipeline.cmd_find([63], pipeline.PipelineConfig())


def test_find_63(records63):
    (rec,) = records63
    assert rec.status == "verified"
    assert hy.models_isomorphic_Q(rec.polynomial(), F63) == "yes"
    assert rec.known_label == "S63B"
    assert rec.report["sign"] == -1
    assert rec.report["monic_model"] == "x^6 -54*x^3 -27"
    assert rec.report["leading_coefficient"] == "1/12"
    assert rec.report["lfactor"]["passed"] and rec.report["igusa"]["passed"]


def test_find_11_is_empty():
    assert pipeline.cmd_find([11], pipeline.PipelineConfig()) == []


def test_find_23():
    (rec,) = pipeline.cmd_find([23], pipeline.PipelineConfig())
    assert rec.status == "verified"
    assert hy.models_isomorphic_Q(rec.polynomial(), P([-7, 10, -11, 2, 2, -8, 1])) == "yes"


def test_non_principal_class_is_skipped():
    recs = pipeline.cmd_find([67], pipeline.PipelineConfig())
    assert sorted(r.status for r in recs) == ["skipped", "verified"]
    skipped = next(r for r in recs if r.status == "skipped")
    assert skipped.report["elementary_divisors"] == [1, 1, 5, 5]


def test_record_line_round_trip(records63):
    rec = records63[0]
    assert pipeline.CurveRecord.from_line(rec.to_line()) == rec


def test_determinism(records63):
    again = pipeline.cmd_find([63], pipeline.PipelineConfig())
    assert [r.comparable() for r in again] == [r.comparable() for r in records63]


def test_warm_cache_matches_cold(tmp_path, records63):
    config = pipeline.PipelineConfig(cache_dir=tmp_path)
    cold = pipeline.cmd_find([63], config)
    assert (tmp_path / "N63" / "S63A.periods").exists()
    assert (tmp_path / "N63" / "S63A.eigen").exists()
    warm = pipeline.cmd_find([63], config)
    assert [r.comparable() for r in warm] == [r.comparable() for r in cold] == \
        [r.comparable() for r in records63]


def test_env_overrides_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(pipeline.CACHE_ENV, str(tmp_path))
    assert pipeline.PipelineConfig(cache_dir="/elsewhere").cache_dir == tmp_path


def test_failure_isolation(monkeypatch, records63):
    real = periods.big_period_matrix

    def flaky(cls, *args, **kwargs):
        if cls.level == 23:
            raise PrecisionLoss("injected")
        return real(cls, *args, **kwargs)

    monkeypatch.setattr(periods, "big_period_matrix", flaky)
    recs = pipeline.cmd_find([23, 63], pipeline.PipelineConfig())
    assert recs[0].status == "failed" and "injected" in recs[0].message
    assert len(recs[0].report["escalations"]) == 4
    assert recs[1].comparable() == records63[0].comparable()


def test_precision_escalation(monkeypatch, records63):
    real = periods.big_period_matrix
    calls = []

    def once(cls, lattice, precision, **kwargs):
        calls.append(precision)
        if len(calls) == 1:
            raise PrecisionLoss("first attempt")
        return real(cls, lattice, precision, **kwargs)

    monkeypatch.setattr(periods, "big_period_matrix", once)
    (rec,) = pipeline.cmd_find([63], pipeline.PipelineConfig())
    assert calls == [128, 256]
    assert rec.status == "verified" and rec.report["precision"] == 256
    assert rec.coefficients == records63[0].coefficients


def test_config_validation():
    with pytest.raises(ValueError):
        pipeline.PipelineConfig(precision_bits=32)
    with pytest.raises(ValueError):
        pipeline.PipelineConfig(prime_bound=0)


# ---------------------------------------------------------------------------
# verify

@pytest.fixture()
def files63(tmp_path, class63):
    curve = tmp_path / "S63B.curve"
    curve.write_text("y^2 = -3x^6 + 162x^3 + 81\n")
    eig = tmp_path / "N63.eigen"
    modsym.write_eigenvalues(class63, eig, 100)
    return curve, eig


def test_verify_passes(files63):
    report = pipeline.cmd_verify(*files63, pipeline.PipelineConfig())
    assert report["passed"], report


def test_verify_with_cached_periods(tmp_path, files63, big63):
    path = tmp_path / "S63A.periods"
    periods.write_period_cache(path, 63, 0, big63)
    report = pipeline.cmd_verify(*files63, pipeline.PipelineConfig(), periods_file=path)
    assert report["igusa"]["passed"] and report["passed"]


def test_verify_corrupted_eigenvalue(files63):
    curve, eig = files63
    lines = eig.read_text().splitlines()
    eig.write_text("\n".join("13 0 0" if ln.startswith("13 ") else ln for ln in lines) + "\n")
    report = pipeline.cmd_verify(curve, eig, pipeline.PipelineConfig())
    assert not report["passed"]
    assert report["lfactor"]["first_failure"] == 13


def test_verify_singular_curve(tmp_path, files63):
    curve = tmp_path / "bad.curve"
    curve.write_text("x^6 + 2x^3 + 1\n")
    report = pipeline.cmd_verify(curve, files63[1], pipeline.PipelineConfig())
    assert not report["passed"] and report["error"].startswith("SingularCurve")


# ---------------------------------------------------------------------------
# table and command line

def test_table_empty(tmp_path):
    text, data = pipeline.cmd_table(tmp_path / "t.txt", [])
    assert pipeline.read_records(data) == []
    assert text.read_text().startswith("label")


def test_table_round_trip(tmp_path, records63):
    text, data = pipeline.cmd_table(tmp_path / "t.txt", records63)
    assert pipeline.read_records(data) == records63
    body = text.read_text()
    assert "S63A" in body and "-3*x^6 +162*x^3 +81" in body


def test_parse_levels():
    assert cli.parse_levels("63..65") == [63, 64, 65]
    assert cli.parse_levels("23,63") == [23, 63]
    with pytest.raises(Exception):
        cli.parse_levels("65..63")


def test_cli_find_writes_json(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    code = cli.main(["find", "--levels", "63..63", "--json", str(out)])
    assert code == 0
    line = capsys.readouterr().out.strip()
    assert json.loads(line)["status"] == "verified"
    assert pipeline.read_records(out)[0].coefficients == ["81", "0", "0", "162", "0", "0", "-3"]


def test_cli_exit_code_on_failure(monkeypatch, capsys):
    monkeypatch.setattr(periods, "big_period_matrix",
                        lambda *a, **k: (_ for _ in ()).throw(PrecisionLoss("injected")))
    assert cli.main(["find", "--levels", "23"]) == 1


def test_cli_verify_and_table(tmp_path, files63, capsys):
    curve, eig = files63
    assert cli.main(["verify", "--curve", str(curve), "--eigenvalues", str(eig)]) == 0
    recs = tmp_path / "r.jsonl"
    assert cli.main(["find", "--levels", "23", "--json", str(recs)]) == 0
    assert cli.main(["table", "--out", str(tmp_path / "t.txt"), "--records", str(recs)]) == 0
    assert "S23A" in (tmp_path / "t.txt").read_text()


def test_cli_missing_file(tmp_path, capsys):
    assert cli.main(["verify", "--curve", str(tmp_path / "no"), "--eigenvalues", str(tmp_path / "no")]) == 2
