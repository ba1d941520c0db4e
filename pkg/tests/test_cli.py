"""End-to-end command-line behaviour and exit codes."""

import json

import pytest

from threadwalk.cli import main


@pytest.fixture()
def corpus_path(tmp_path):
    path = tmp_path / "corpus.jsonl"
    code = main(
        [
            "generate",
            "--output",
            str(path),
            "--task",
            "hate",
            "--num-trees",
            "60",
            "--mean-tree-size",
            "8",
            "--positive-fraction",
            "0.25",
            "--context-signal",
            "0.6",
            "--seed",
            "11",
        ]
    )
    assert code == 0
    return path


def _fast_flags():
    return ["--epochs", "8", "--bow-dim", "32", "--seed", "2"]


def test_generate_then_validate(corpus_path, capsys):
    assert main(["validate", str(corpus_path)]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["trees"] == 60
    assert set(stats["label_counts"]) == {"hate", "non-hate"}


def test_validate_reports_cycles(tmp_path, capsys):
    path = tmp_path / "bad.jsonl"
    rows = [
        {"tree_id": "t", "id": "x", "parent_id": "y", "text": "a", "label": "hate"},
        {"tree_id": "t", "id": "y", "parent_id": "x", "text": "b", "label": "hate"},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    code = main(["validate", str(path)])
    assert code == 1
    assert "cycle" in capsys.readouterr().err.lower()


def test_run_and_manifest_replay(corpus_path, tmp_path):
    first = tmp_path / "first"
    code = main(
        ["run", "--corpus", str(corpus_path), "--out", str(first), "--task", "hate"]
        + _fast_flags()
    )
    assert code == 0
    for name in ("manifest.json", "model.txt", "report.txt", "metrics.json"):
        assert (first / name).exists()

    second = tmp_path / "second"
    code = main(
        [
            "run",
            "--corpus",
            str(corpus_path),
            "--out",
            str(second),
            "--config",
            str(first / "manifest.json"),
        ]
    )
    assert code == 0
    assert (second / "metrics.json").read_bytes() == (first / "metrics.json").read_bytes()
    assert (second / "model.txt").read_bytes() == (first / "model.txt").read_bytes()


def test_wrong_task_label_domain_exits_2(corpus_path, tmp_path, capsys):
    code = main(
        [
            "run",
            "--corpus",
            str(corpus_path),
            "--out",
            str(tmp_path / "out"),
            "--task",
            "polarity",
        ]
        + _fast_flags()
    )
    assert code == 2
    assert "label" in capsys.readouterr().err.lower()


def test_train_then_evaluate_matches_run_report(corpus_path, tmp_path, capsys):
    rundir = tmp_path / "run"
    assert (
        main(
            ["run", "--corpus", str(corpus_path), "--out", str(rundir), "--task", "hate"]
            + _fast_flags()
        )
        == 0
    )
    capsys.readouterr()

    traindir = tmp_path / "train"
    assert (
        main(
            [
                "train",
                "--corpus",
                str(corpus_path),
                "--out",
                str(traindir),
                "--config",
                str(rundir / "manifest.json"),
            ]
        )
        == 0
    )
    assert (traindir / "model.txt").read_bytes() == (rundir / "model.txt").read_bytes()
    capsys.readouterr()

    code = main(
        [
            "evaluate",
            "--corpus",
            str(corpus_path),
            "--model",
            str(traindir / "model.txt"),
            "--config",
            str(rundir / "manifest.json"),
        ]
    )
    assert code == 0
    printed = capsys.readouterr().out
    assert printed == (rundir / "report.txt").read_text()


def test_featurize_with_traces(corpus_path, tmp_path):
    features = tmp_path / "features.jsonl"
    traces = tmp_path / "traces.jsonl"
    code = main(
        [
            "featurize",
            "--corpus",
            str(corpus_path),
            "--output",
            str(features),
            "--traces",
            str(traces),
            "--task",
            "hate",
        ]
        + _fast_flags()
    )
    assert code == 0
    feature_lines = features.read_text().strip().split("\n")
    trace_lines = traces.read_text().strip().split("\n")
    assert len(feature_lines) == len(trace_lines)
    record = json.loads(feature_lines[0])
    assert set(record) == {"tree_id", "node_id", "label", "features"}
    trace = json.loads(trace_lines[0])
    assert {"tree_id", "start", "raw_steps", "node_ids", "weights"} <= set(trace)


def test_grid_search_csv_and_replay(corpus_path, tmp_path):
    first = tmp_path / "grid1"
    args = [
        "grid-search",
        "--corpus",
        str(corpus_path),
        "--task",
        "hate",
        "--p-values",
        "0.5,1.0",
        "--gamma-values",
        "0.0,0.8",
        "--seeds",
        "0,1",
        "--jobs",
        "1",
    ] + _fast_flags()
    assert main(args + ["--out", str(first)]) == 0
    csv_lines = (first / "grid.csv").read_text().strip().split("\n")
    assert len(csv_lines) == 5

    second = tmp_path / "grid2"
    replay = [
        "grid-search",
        "--corpus",
        str(corpus_path),
        "--config",
        str(first / "manifest.json"),
        "--jobs",
        "1",
        "--out",
        str(second),
    ]
    assert main(replay) == 0
    assert (second / "grid.csv").read_bytes() == (first / "grid.csv").read_bytes()


def test_ablate_concat_rows(corpus_path, tmp_path, capsys):
    out = tmp_path / "ablate"
    code = main(
        [
            "ablate-concat",
            "--corpus",
            str(corpus_path),
            "--task",
            "hate",
            "--seeds",
            "0,1",
            "--out",
            str(out),
        ]
        + _fast_flags()
    )
    assert code == 0
    lines = (out / "ablation.csv").read_text().strip().split("\n")
    assert len(lines) == 5
    assert [row.split(",")[0] for row in lines[1:]] == [
        "uv",
        "uv_mul",
        "uv_absdiff",
        "uv_absdiff_mul",
    ]


def test_error_analysis_reconciles(corpus_path, tmp_path, capsys):
    rundir = tmp_path / "run"
    assert (
        main(
            ["run", "--corpus", str(corpus_path), "--out", str(rundir), "--task", "hate"]
            + _fast_flags()
        )
        == 0
    )
    metrics = json.loads((rundir / "metrics.json").read_text())
    confusion = metrics["report"]["confusion"]
    names = metrics["report"]["class_names"]
    pos = names.index(metrics["report"]["positive_label"])
    neg = 1 - pos
    capsys.readouterr()

    out = tmp_path / "errors"
    code = main(
        [
            "error-analysis",
            "--corpus",
            str(corpus_path),
            "--model",
            str(rundir / "model.txt"),
            "--config",
            str(rundir / "manifest.json"),
            "--out",
            str(out),
        ]
    )
    assert code == 0
    records = [
        json.loads(line)
        for line in (out / "errors.jsonl").read_text().strip().split("\n")
        if line
    ]
    fps = [r for r in records if r["kind"] == "fp"]
    fns = [r for r in records if r["kind"] == "fn"]
    assert len(fps) == confusion[neg][pos]
    assert len(fns) == confusion[pos][neg]


def test_env_var_sets_default_outdir(corpus_path, tmp_path, monkeypatch):
    outdir = tmp_path / "from-env"
    monkeypatch.setenv("THREADWALK_OUT", str(outdir))
    code = main(
        ["train", "--corpus", str(corpus_path), "--task", "hate"] + _fast_flags()
    )
    assert code == 0
    assert (outdir / "model.txt").exists()


def test_bad_flag_exits_2(corpus_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["run", "--corpus", str(corpus_path), "--task", "sentiment"])
    assert excinfo.value.code == 2


def test_missing_corpus_exits_2(tmp_path):
    code = main(["validate", str(tmp_path / "absent.jsonl")])
    assert code == 2
