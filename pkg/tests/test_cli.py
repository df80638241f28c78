"""End-to-end command checks: exit codes, files, and reproducibility."""

import json

import numpy as np
import pytest

from movingpoints import mpa
from movingpoints.cli import main

IRIS_ARGS = [
    "--label-col", "Species",
    "--positive-label", "Iris-setosa",
    "--negative-label", "Iris-versicolor",
    "--features", "SepalLengthCm,SepalWidthCm",
]
FIT_ARGS = ["--eta", "0.5", "--epochs", "200", "--seed", "0"]


def fit_iris(iris_path, out_path, extra=()):
    argv = (["fit", "--input", str(iris_path), "--output", str(out_path)]
            + IRIS_ARGS + FIT_ARGS + list(extra))
    return main(argv)


class TestFit:
    def test_writes_model_and_log(self, iris_path, tmp_path, capsys):
        model_path = tmp_path / "m.json"
        assert fit_iris(iris_path, model_path) == 0
        assert model_path.exists()
        assert (tmp_path / "m.json.log").exists()
        out = capsys.readouterr().out
        assert "train accuracy: 1.0" in out

    def test_byte_identical_reruns(self, iris_path, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert fit_iris(iris_path, a) == 0
        assert fit_iris(iris_path, b) == 0
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a.json.log").read_bytes() == \
            (tmp_path / "b.json.log").read_bytes()

    def test_missing_input_is_exit_2(self, tmp_path, capsys):
        rc = fit_iris(tmp_path / "nope.csv", tmp_path / "m.json")
        assert rc == 2
        assert "mpa fit:" in capsys.readouterr().err

    def test_bad_label_column_is_exit_2(self, iris_path, tmp_path, capsys):
        argv = ["fit", "--input", str(iris_path),
                "--output", str(tmp_path / "m.json"),
                "--label-col", "NoSuchColumn", "--positive-label", "x"]
        assert main(argv) == 2
        err = capsys.readouterr().err
        assert "mpa fit:" in err and "NoSuchColumn" in err

    def test_unknown_flag_raises_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["fit", "--frobnicate"])
        assert exc.value.code == 2

    def test_config_file_with_flag_override(self, iris_path, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("eta=0.001\nepochs=200\nseed=0\n", encoding="utf-8")
        out = tmp_path / "m.json"
        argv = (["fit", "--input", str(iris_path), "--output", str(out)]
                + IRIS_ARGS + ["--config", str(cfg), "--eta", "0.5"])
        assert main(argv) == 0
        doc = json.loads(out.read_text(encoding="utf-8"))
        assert doc["config"]["eta"] == 0.5      # flag wins
        assert doc["config"]["epochs"] == 200   # file fills the rest

    def test_config_file_alone(self, iris_path, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("eta=0.25\n", encoding="utf-8")
        out = tmp_path / "m.json"
        argv = (["fit", "--input", str(iris_path), "--output", str(out)]
                + IRIS_ARGS + ["--config", str(cfg)])
        assert main(argv) == 0
        doc = json.loads(out.read_text(encoding="utf-8"))
        assert doc["config"]["eta"] == 0.25


class TestPredict:
    @pytest.fixture()
    def model_path(self, iris_path, tmp_path):
        p = tmp_path / "m.json"
        assert fit_iris(iris_path, p) == 0
        return p

    def test_writes_predictions(self, iris_path, model_path, tmp_path, capsys):
        out = tmp_path / "preds.csv"
        argv = (["predict", "--input", str(iris_path), "--model",
                 str(model_path), "--output", str(out)] + IRIS_ARGS)
        assert main(argv) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "prediction"
        assert len(lines) == 101
        assert set(lines[1:]) <= {"0", "1"}
        assert "accuracy: 1.0" in capsys.readouterr().out

    def test_unlabeled_input_uses_model_features(self, iris_path, model_path,
                                                 tmp_path):
        # strip the label column; model carries its own feature names
        rows = iris_path.read_text(encoding="utf-8").splitlines()
        header = rows[0].split(",")
        keep = [header.index("SepalLengthCm"), header.index("SepalWidthCm")]
        plain = tmp_path / "plain.csv"
        plain.write_text(
            "\n".join(",".join(r.split(",")[i] for i in keep) for r in rows)
            + "\n", encoding="utf-8")
        out = tmp_path / "preds.csv"
        argv = ["predict", "--input", str(plain), "--model", str(model_path),
                "--output", str(out)]
        assert main(argv) == 0
        assert len(out.read_text(encoding="utf-8").splitlines()) == 151

    def test_missing_model_is_exit_2(self, iris_path, tmp_path):
        argv = ["predict", "--input", str(iris_path),
                "--model", str(tmp_path / "absent.json"),
                "--output", str(tmp_path / "p.csv")]
        assert main(argv) == 2


class TestBench:
    def test_synthetic_small(self, tmp_path, capsys):
        out = tmp_path / "suite.csv"
        argv = ["bench", "synthetic", "--seeds", "2", "--stds", "2",
                "--n-per-class", "20", "--seed", "5", "--output", str(out)]
        assert main(argv) == 0
        text = out.read_text(encoding="utf-8")
        assert "# protocol: synthetic-suite" in text
        assert "seed01-std1.1,mpa," in text
        assert "mean train acc" in capsys.readouterr().out

    def test_synthetic_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["bench", "synthetic", "--seeds", "2", "--stds", "1",
                "--n-per-class", "20", "--seed", "5"]
        assert main(base + ["--output", str(a)]) == 0
        assert main(base + ["--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_dataset_protocol(self, iris_path, tmp_path):
        out = tmp_path / "ds.csv"
        argv = ["bench", "dataset", "--input", str(iris_path),
                "--label-col", "Species",
                "--positive-label", "Iris-virginica",
                "--negative-label", "Iris-versicolor",
                "--reps", "2", "--seed", "3", "--eta", "0.0005",
                "--output", str(out)]
        assert main(argv) == 0
        text = out.read_text(encoding="utf-8")
        assert "rep000,mpa," in text and "rep001,svm," in text


class TestPlot:
    def test_svg_output_and_separation(self, iris_path, tmp_path):
        model_path = tmp_path / "m.json"
        assert fit_iris(iris_path, model_path) == 0
        svg_path = tmp_path / "plot.svg"
        argv = (["plot", "--input", str(iris_path), "--model", str(model_path),
                 "--output", str(svg_path)] + IRIS_ARGS)
        assert main(argv) == 0
        svg = svg_path.read_text(encoding="utf-8")
        assert svg.startswith("<svg ")
        assert 'id="boundary"' in svg
        assert svg.count('class="pt0"') == 50
        assert svg.count('class="pt1"') == 50
        assert 'id="mp0"' in svg and 'id="mp1"' in svg
        # the drawn boundary comes from the same model, so zero markers on
        # the wrong side means the model scores its own training set clean
        from movingpoints.datasets import load_csv
        ds = load_csv(iris_path, "Species", "Iris-setosa",
                      feature_columns=["SepalLengthCm", "SepalWidthCm"],
                      negative_label="Iris-versicolor")
        model = mpa.load_model(model_path)
        preds = mpa.predict_many(model, ds.features)
        assert np.array_equal(preds, ds.labels)

    def test_refuses_non_2d_model(self, iris_path, tmp_path, capsys):
        model_path = tmp_path / "m4.json"
        argv = ["fit", "--input", str(iris_path), "--output", str(model_path),
                "--label-col", "Species",
                "--positive-label", "Iris-virginica",
                "--negative-label", "Iris-versicolor",
                "--eta", "0.0005"]
        assert main(argv) == 0  # 4-feature model
        rc = main(["plot", "--input", str(iris_path),
                   "--model", str(model_path),
                   "--output", str(tmp_path / "x.svg"),
                   "--label-col", "Species",
                   "--positive-label", "Iris-virginica",
                   "--negative-label", "Iris-versicolor"])
        assert rc == 2
        assert "2" in capsys.readouterr().err
