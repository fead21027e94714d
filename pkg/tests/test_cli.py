"""End-to-end CLI behavior: commands, artifacts, exit codes, determinism."""

import io
import sys

import pytest

from nordlid.cli import main
from nordlid.corpus import LABELS, Sentence, save_dataset_tsv
from nordlid.synth import generate_pools


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    """A small synthetic dataset written as TSV train/test files."""
    base = tmp_path_factory.mktemp("data")
    pools = generate_pools(30, "wiki", seed=0)
    sentences = [s for code in LABELS for s in pools[code]]
    save_dataset_tsv(sentences, base / "all.tsv")
    assert main([
        "corpus", "split", "--input", str(base / "all.tsv"),
        "--train-out", str(base / "train.tsv"),
        "--test-out", str(base / "test.tsv"),
        "--ratio", "0.8", "--seed", "42",
    ]) == 0
    return base


class TestCorpusCommands:
    def test_clean_and_counts(self, tmp_path, capsys):
        raw = tmp_path / "raw"
        raw.mkdir()
        for code in LABELS:
            (raw / f"{code}.txt").write_text(
                "Hej med dig. En mere! Og en?\nSidste linje her.", encoding="utf-8"
            )
        out = tmp_path / "data.tsv"
        assert main(["corpus", "clean", "--raw-dir", str(raw), "--out", str(out)]) == 0
        captured = capsys.readouterr().out
        assert "dk\t4" in captured
        assert out.read_text(encoding="utf-8").count("\n") == 24

    def test_split_counts(self, tmp_path):
        pools = generate_pools(10, "wiki", seed=1)
        save_dataset_tsv([s for c in LABELS for s in pools[c]], tmp_path / "d.tsv")
        code = main([
            "corpus", "split", "--input", str(tmp_path / "d.tsv"),
            "--train-out", str(tmp_path / "tr.tsv"),
            "--test-out", str(tmp_path / "te.tsv"),
            "--ratio", "0.8", "--seed", "1",
        ])
        assert code == 0
        train_lines = (tmp_path / "tr.tsv").read_text(encoding="utf-8").splitlines()
        test_lines = (tmp_path / "te.tsv").read_text(encoding="utf-8").splitlines()
        assert len(train_lines) == 48 and len(test_lines) == 12

    def test_split_rerun_byte_identical(self, tmp_path):
        pools = generate_pools(8, "wiki", seed=2)
        save_dataset_tsv([s for c in LABELS for s in pools[c]], tmp_path / "d.tsv")
        args = [
            "corpus", "split", "--input", str(tmp_path / "d.tsv"),
            "--train-out", str(tmp_path / "tr.tsv"),
            "--test-out", str(tmp_path / "te.tsv"),
            "--seed", "9",
        ]
        main(args)
        first = (tmp_path / "tr.tsv").read_bytes()
        main(args)
        assert (tmp_path / "tr.tsv").read_bytes() == first

    def test_missing_input_exit_2(self, tmp_path):
        code = main([
            "corpus", "split", "--input", str(tmp_path / "nope.tsv"),
            "--train-out", str(tmp_path / "a"), "--test-out", str(tmp_path / "b"),
        ])
        assert code == 2

    def test_invalid_ratio_exit_3(self, data_dir, tmp_path):
        code = main([
            "corpus", "split", "--input", str(data_dir / "all.tsv"),
            "--train-out", str(tmp_path / "a"), "--test-out", str(tmp_path / "b"),
            "--ratio", "1.0",
        ])
        assert code == 3

    def test_tatoeba(self, tmp_path, capsys):
        f = tmp_path / "t.tsv"
        f.write_text("dk\tJeg kan ikke lide æg.\nxx\tskip me\n", encoding="utf-8")
        out = tmp_path / "o.tsv"
        assert main(["corpus", "tatoeba", "--input", str(f), "--out", str(out)]) == 0
        assert "skipped\t1" in capsys.readouterr().out
        assert out.read_text(encoding="utf-8") == "dk\tjeg kan ikke lide æg \n"


class TestTrainEvalPredict:
    def test_nb_on_disjoint_toy_corpus_scores_one(self, tmp_path, capsys):
        rows = []
        words = {c: f"ord{c} tekst{c} mere{c}" for c in LABELS}
        for code in LABELS:
            rows += [Sentence(words[code], code)] * 2
        save_dataset_tsv(rows, tmp_path / "toy.tsv")
        model_file = tmp_path / "nb.ndsl"
        assert main([
            "train", "--model", "nb", "--features", "char2",
            "--train", str(tmp_path / "toy.tsv"), "--out", str(model_file),
        ]) == 0
        assert main([
            "eval", "--model-file", str(model_file),
            "--test", str(tmp_path / "toy.tsv"), "--out-dir", str(tmp_path / "rep"),
        ]) == 0
        out = capsys.readouterr().out
        assert "accuracy\t1" in out
        confusion = (tmp_path / "rep" / "confusion.csv").read_text(encoding="utf-8")
        assert confusion.startswith("true\\pred,dk,sv,nn,nb,fo,is")
        assert (tmp_path / "rep" / "report.txt").exists()

    def test_incompatible_spec_exit_3(self, data_dir, tmp_path):
        code = main([
            "train", "--model", "cnn", "--features", "bow",
            "--train", str(data_dir / "train.tsv"), "--out", str(tmp_path / "x"),
        ])
        assert code == 3

    def test_nb_rejects_embedding_features(self, data_dir, tmp_path):
        code = main([
            "train", "--model", "nb", "--features", "skipgram",
            "--train", str(data_dir / "train.tsv"), "--out", str(tmp_path / "x"),
        ])
        assert code == 3

    def test_predict_empty_input(self, data_dir, tmp_path, capsys, monkeypatch):
        model_file = tmp_path / "m.ndsl"
        assert main([
            "train", "--model", "logreg", "--features", "char1",
            "--train", str(data_dir / "train.tsv"), "--out", str(model_file),
            "--epochs", "5",
        ]) == 0
        capsys.readouterr()
        monkeypatch.setattr(sys, "stdin", io.StringIO(""))
        assert main(["predict", "--model-file", str(model_file)]) == 0
        assert capsys.readouterr().out == ""

    def test_predict_lines(self, data_dir, tmp_path, capsys, monkeypatch):
        model_file = tmp_path / "m.ndsl"
        main([
            "train", "--model", "logreg", "--features", "char2",
            "--train", str(data_dir / "train.tsv"), "--out", str(model_file),
            "--epochs", "30",
        ])
        capsys.readouterr()
        monkeypatch.setattr(sys, "stdin", io.StringIO("hej med dig\nßß!!\n"))
        assert main(["predict", "--model-file", str(model_file)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 2
        assert all(label in LABELS for label in lines)

    def test_train_rerun_byte_identical(self, data_dir, tmp_path):
        args = [
            "train", "--model", "svm", "--features", "char2",
            "--train", str(data_dir / "train.tsv"),
            "--out", str(tmp_path / "svm.ndsl"), "--epochs", "2", "--seed", "7",
        ]
        assert main(args) == 0
        first = (tmp_path / "svm.ndsl").read_bytes()
        assert main(args) == 0
        assert (tmp_path / "svm.ndsl").read_bytes() == first

    @pytest.mark.parametrize(
        "model,features,extra",
        [
            ("knn", "cbow", ["--dim", "8", "--embed-epochs", "1", "--k", "3"]),
            ("svm", "skipgram", ["--dim", "8", "--embed-epochs", "1", "--epochs", "2"]),
            ("mlp", "char1", ["--epochs", "2", "--hidden", "8"]),
            ("fasttext", "bow", ["--dim", "8", "--epochs", "2"]),
            ("fasttext", "char1_5", ["--dim", "8", "--epochs", "1"]),
        ],
    )
    def test_other_model_feature_combos(self, data_dir, tmp_path, model, features, extra):
        model_file = tmp_path / f"{model}-{features}.ndsl"
        assert main([
            "train", "--model", model, "--features", features,
            "--train", str(data_dir / "train.tsv"), "--out", str(model_file),
            *extra,
        ]) == 0
        assert main([
            "eval", "--model-file", str(model_file),
            "--test", str(data_dir / "test.tsv"),
            "--out-dir", str(tmp_path / "rep"),
        ]) == 0

    def test_numerical_failure_exit_4(self, data_dir, tmp_path, monkeypatch):
        from nordlid import cli
        from nordlid.errors import ConvergenceFailure

        def boom(args):
            raise ConvergenceFailure(0, 1.0)

        monkeypatch.setattr(cli, "cmd_reduce", boom)
        code = main([
            "reduce", "--method", "pca", "--input", str(data_dir / "train.tsv"),
            "--out", str(tmp_path / "p.tsv"),
        ])
        assert code == 4


class TestReduceSweepProfile:
    def test_reduce_pca_output_shape(self, data_dir, tmp_path):
        out = tmp_path / "proj.tsv"
        assert main([
            "reduce", "--method", "pca", "--input", str(data_dir / "train.tsv"),
            "--out", str(out), "--max-points", "60",
        ]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 60
        label, x, y = lines[0].split("\t")
        assert label in LABELS
        float(x), float(y)

    def test_reduce_tsne_deterministic(self, data_dir, tmp_path):
        args = [
            "reduce", "--method", "tsne", "--input", str(data_dir / "train.tsv"),
            "--out", str(tmp_path / "t.tsv"), "--max-points", "30",
            "--perplexity", "8", "--iterations", "60", "--seed", "3",
        ]
        assert main(args) == 0
        first = (tmp_path / "t.tsv").read_bytes()
        assert main(args) == 0
        assert (tmp_path / "t.tsv").read_bytes() == first

    def test_sweep_csv(self, data_dir, tmp_path):
        out = tmp_path / "sweep.csv"
        assert main([
            "sweep", "--train", str(data_dir / "train.tsv"),
            "--test", str(data_dir / "test.tsv"), "--out", str(out),
            "--grams", "1", "--kernels", "1,2", "--epochs", "1",
            "--filters", "2", "--embed-dim", "3", "--max-len", "32",
        ]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "gram,kernel,accuracy"
        assert len(lines) == 3
        for line in lines[1:]:
            gram, kernel, accuracy = line.split(",")
            assert 0.0 <= float(accuracy) <= 1.0

    def test_profile_raw_counts(self, data_dir, tmp_path):
        out = tmp_path / "profile.csv"
        assert main([
            "profile", "--input", str(data_dir / "train.tsv"), "--out", str(out),
        ]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "char," + ",".join(LABELS)
        assert len(lines) == 41
        assert lines[-1].startswith("<space>,")
