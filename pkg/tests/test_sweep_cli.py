import csv
import io
import math

import pytest

from gbsed import sweep
from gbsed.channel import BSC, UNPROTECTED
from gbsed.cli import main
from gbsed.ontology import default_ontology, emit_ontology
from gbsed.scenarios import ScenarioSpec, generate

ONT = default_ontology()


@pytest.fixture(scope="module")
def small_corpus():
    return generate(ScenarioSpec(seed=7, num_sequences=10, frames_per_sequence=5), ONT)


# -- sweep engine -------------------------------------------------------------

def test_encode_decode_frame_round_trip(small_corpus):
    frame = small_corpus[0].frames[0]
    payload = sweep.encode_frame(frame, ONT)
    back = sweep.decode_frame(payload, ONT)
    assert back.edges == frame.edges


def test_decode_frame_garbage_is_none():
    assert sweep.decode_frame(b"garbage", ONT) is None
    assert sweep.decode_frame(b"", ONT) is None


def test_noiseless_sweep_row(small_corpus):
    cfg = sweep.SweepConfig(snr_points=(math.inf,), trials_per_point=1)
    (row,) = sweep.run_sweep(small_corpus, ONT, cfg)
    assert row["ber"] == 0.0
    assert row["fidelity"] == 1.0
    assert row["consistency"] == 1.0
    assert row["accuracy"] == 1.0


def test_sweep_deterministic(small_corpus):
    cfg = sweep.SweepConfig(snr_points=(6.0, 12.0), trials_per_point=50, base_seed=3)
    a = sweep.rows_to_csv(sweep.run_sweep(small_corpus, ONT, cfg))
    b = sweep.rows_to_csv(sweep.run_sweep(small_corpus, ONT, cfg))
    assert a == b


def test_sweep_thread_pool_output_identical(small_corpus, monkeypatch):
    cfg = sweep.SweepConfig(snr_points=(4.0, 10.0, 16.0), trials_per_point=50)
    serial = sweep.rows_to_csv(sweep.run_sweep(small_corpus, ONT, cfg))
    monkeypatch.setenv("GBSED_THREADS", "3")
    parallel = sweep.rows_to_csv(sweep.run_sweep(small_corpus, ONT, cfg))
    assert serial == parallel


def test_csv_schema(small_corpus):
    cfg = sweep.SweepConfig(snr_points=(math.inf,), trials_per_point=1)
    text = sweep.rows_to_csv(sweep.run_sweep(small_corpus, ONT, cfg))
    header = text.splitlines()[0]
    assert header == ("snr_db,ber,fidelity,consistency,accuracy,precision,"
                      "recall,f1,mcc,auc,mean_payload_octets,frames_per_payload")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 1 and rows[0]["snr_db"] == "inf"


def test_bsc_sweep(small_corpus):
    cfg = sweep.SweepConfig(snr_points=(0.0,), trials_per_point=20,
                            channel_kind=BSC, bsc_flip_prob=0.02)
    (row,) = sweep.run_sweep(small_corpus, ONT, cfg)
    assert row["ber"] == pytest.approx(0.02, abs=0.01)


def test_unprotected_header_degrades(small_corpus):
    protected = sweep.SweepConfig(snr_points=(0.0,), trials_per_point=50)
    unprotected = sweep.SweepConfig(snr_points=(0.0,), trials_per_point=50,
                                    header_protection=UNPROTECTED)
    (p,) = sweep.run_sweep(small_corpus, ONT, protected)
    (u,) = sweep.run_sweep(small_corpus, ONT, unprotected)
    assert u["fidelity"] < p["fidelity"]


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        sweep.SweepConfig(snr_points=())
    with pytest.raises(ValueError):
        sweep.SweepConfig(trials_per_point=0)
    with pytest.raises(ValueError):
        sweep.run_sweep([], ONT, sweep.SweepConfig())


# -- CLI ----------------------------------------------------------------------

def _gen(tmp_path, **kw):
    scenes = tmp_path / "c.scenes"
    args = ["gen", "--seed", "5", "--sequences", "6", "--frames", "4",
            "--out", str(scenes)]
    for k, v in kw.items():
        args += [f"--{k}", str(v)]
    assert main(args) == 0
    return scenes


def test_cli_gen_deterministic(tmp_path):
    a = _gen(tmp_path)
    b = tmp_path / "again.scenes"
    assert main(["gen", "--seed", "5", "--sequences", "6", "--frames", "4",
                 "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_encode(tmp_path, capsys):
    scenes = _gen(tmp_path)
    out = tmp_path / "payloads"
    assert main(["encode", "--scenes", str(scenes), "--out", str(out)]) == 0
    files = sorted(out.iterdir())
    assert len(files) == 24  # 6 sequences x 4 frames
    assert all(f.suffix == ".gbsd" for f in files)
    assert "compression ratio" in capsys.readouterr().out


def test_cli_encode_empty(tmp_path, capsys):
    scenes = tmp_path / "empty.scenes"
    scenes.write_text("")
    assert main(["encode", "--scenes", str(scenes), "--out", str(tmp_path / "o")]) == 0
    assert "0 frames" in capsys.readouterr().out


def test_cli_sweep_and_report(tmp_path, capsys):
    scenes = _gen(tmp_path)
    out = tmp_path / "r.csv"
    assert main(["sweep", "--scenes", str(scenes), "--out", str(out),
                 "--snr", "noiseless,10", "--trials", "10"]) == 0
    text = out.read_text()
    assert text.startswith("snr_db,")
    assert len(text.splitlines()) == 3
    capsys.readouterr()
    assert main(["report", "--csv", str(out)]) == 0
    rendered = capsys.readouterr().out
    assert "CR" in rendered and "Reduction (%)" in rendered


def test_cli_report_empty(tmp_path, capsys):
    empty = tmp_path / "e.csv"
    empty.write_text("snr_db,ber\n")
    assert main(["report", "--csv", str(empty)]) == 0
    assert "no rows" in capsys.readouterr().out


def test_cli_custom_ontology(tmp_path):
    cfg = tmp_path / "o.cfg"
    cfg.write_text(emit_ontology(ONT))
    scenes = _gen(tmp_path, ontology=str(cfg))
    assert main(["encode", "--scenes", str(scenes), "--ontology", str(cfg),
                 "--out", str(tmp_path / "p")]) == 0


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["bogus"]) == 2                       # usage
    assert main([]) == 2
    assert main(["encode", "--scenes", str(tmp_path / "missing.scenes"),
                 "--out", str(tmp_path / "o")]) == 3  # data error
    bad = tmp_path / "bad.scenes"
    bad.write_text("not a scene line\n")
    assert main(["encode", "--scenes", str(bad), "--out", str(tmp_path / "o")]) == 3
    capsys.readouterr()


def test_cli_help_exits_zero():
    assert main(["--help"]) == 0
