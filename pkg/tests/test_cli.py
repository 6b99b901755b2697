import json
import os

import pytest
from click.testing import CliRunner

from modtest.cli import cli_dispatch, main
from modtest.harness import load_manifest

from conftest import BANNED_WORDS, make_seeds


@pytest.fixture()
def runner():
    return CliRunner()


def write_corpus(path, n=4):
    with open(path, "w", encoding="utf-8") as fh:
        for seed in make_seeds(n):
            fh.write(json.dumps({"seed_id": seed.seed_id, "text": seed.text}) + "\n")
    return str(path)


def write_lexicon(path, words=BANNED_WORDS):
    path.write_text("\n".join(words) + "\n")
    return str(path)


class TestSeedsFilter:
    def test_keeps_toxic_baselines(self, runner, tmp_path):
        corpus = write_corpus(tmp_path / "seeds.jsonl", 4)
        verdicts = {"seed-00": "toxic", "seed-01": "non_toxic",
                    "seed-02": "toxic", "seed-03": "toxic"}
        vfile = tmp_path / "baseline.json"
        vfile.write_text(json.dumps(verdicts))
        out = tmp_path / "kept.jsonl"
        result = runner.invoke(main, ["seeds", "filter", "--corpus", corpus,
                                      "--baseline-verdicts", str(vfile),
                                      "--out", str(out)])
        assert result.exit_code == 0, result.output
        kept = [json.loads(l) for l in out.read_text().splitlines()]
        assert [s["seed_id"] for s in kept] == ["seed-00", "seed-02", "seed-03"]


class TestGenerate:
    def test_two_mrs_on_four_seeds(self, runner, tmp_path):
        corpus = write_corpus(tmp_path / "seeds.jsonl", 4)
        out = tmp_path / "suite"
        result = runner.invoke(main, ["generate", "--corpus", corpus,
                                      "--mrs", "mirror,crop", "--out", str(out)])
        assert result.exit_code == 0, result.output
        manifest = load_manifest(str(out / "manifest.jsonl"))
        assert len(manifest) == 8

    def test_unknown_mr_is_usage_error(self, tmp_path):
        corpus = write_corpus(tmp_path / "seeds.jsonl", 1)
        code = cli_dispatch(["generate", "--corpus", corpus,
                             "--mrs", "wobble", "--out", str(tmp_path / "s")])
        assert code == 2

    def test_invalid_combo_is_usage_error(self, tmp_path):
        corpus = write_corpus(tmp_path / "seeds.jsonl", 1)
        code = cli_dispatch(["generate", "--corpus", corpus, "--mrs", "",
                             "--combo", "mirror+font-color",
                             "--out", str(tmp_path / "s")])
        assert code == 2

    def test_combo_cases_added(self, runner, tmp_path):
        corpus = write_corpus(tmp_path / "seeds.jsonl", 2)
        out = tmp_path / "suite"
        result = runner.invoke(main, ["generate", "--corpus", corpus,
                                      "--mrs", "", "--combo", "font-color+mirror",
                                      "--out", str(out)])
        assert result.exit_code == 0, result.output
        manifest = load_manifest(str(out / "manifest.jsonl"))
        assert len(manifest) == 2
        assert all(len(e["mr_chain"]) == 2 for e in manifest)


@pytest.fixture()
def generated(runner, tmp_path):
    corpus = write_corpus(tmp_path / "seeds.jsonl", 4)
    out = tmp_path / "suite"
    result = runner.invoke(main, ["generate", "--corpus", corpus,
                                  "--mrs", "mirror,crop", "--out", str(out)])
    assert result.exit_code == 0, result.output
    return tmp_path, str(out / "manifest.jsonl")


class TestRunReportExport:
    def test_reference_pipeline(self, runner, generated, tmp_path):
        workdir, manifest = generated
        lex = write_lexicon(tmp_path / "lexicon.txt")
        result = runner.invoke(main, ["run", "--manifest", manifest,
                                      "--target", "reference",
                                      "--banned-lexicon", lex])
        assert result.exit_code == 0, result.output
        verdicts_path = os.path.join(os.path.dirname(manifest), "verdicts.json")
        assert os.path.exists(verdicts_path)

        report_dir = tmp_path / "report"
        result = runner.invoke(main, ["report", "--verdicts", verdicts_path,
                                      "--manifest", manifest,
                                      "--format", "markdown",
                                      "--out", str(report_dir)])
        assert result.exit_code == 0, result.output
        text = (report_dir / "report.md").read_text()
        assert "## Picture Level" in text
        assert (report_dir / "efr_by_mr.png").exists()

        retrain = tmp_path / "retrain"
        result = runner.invoke(main, ["export-retrain", "--verdicts",
                                      verdicts_path, "--manifest", manifest,
                                      "--out", str(retrain)])
        assert result.exit_code == 0, result.output
        assert (retrain / "index.jsonl").exists()

    def test_report_stdout_markdown(self, runner, generated, tmp_path):
        workdir, manifest = generated
        lex = write_lexicon(tmp_path / "lexicon.txt")
        runner.invoke(main, ["run", "--manifest", manifest, "--target",
                             "reference", "--banned-lexicon", lex])
        verdicts_path = os.path.join(os.path.dirname(manifest), "verdicts.json")
        result = runner.invoke(main, ["report", "--verdicts", verdicts_path,
                                      "--manifest", manifest])
        assert result.exit_code == 0, result.output
        assert "| MR |" in result.output

    def test_unknown_target(self, generated):
        _, manifest = generated
        assert cli_dispatch(["run", "--manifest", manifest,
                             "--target", "telepathy"]) == 2

    def test_offline_target_exits_1(self, generated):
        _, manifest = generated
        code = cli_dispatch(["run", "--manifest", manifest, "--target", "mock",
                             "--endpoint", "http://127.0.0.1:1/moderate"])
        assert code == 1


class TestReproducibility:
    def test_same_seed_byte_identical(self, runner, tmp_path):
        corpus = write_corpus(tmp_path / "seeds.jsonl", 3)
        dirs = [tmp_path / "a", tmp_path / "b"]
        for d in dirs:
            result = runner.invoke(main, ["generate", "--corpus", corpus,
                                          "--mrs", "char-rotation,scribbling",
                                          "--rng-seed", "11", "--out", str(d)])
            assert result.exit_code == 0, result.output
        a, b = dirs
        assert (a / "manifest.jsonl").read_bytes() == (b / "manifest.jsonl").read_bytes()
        for name in os.listdir(a / "images"):
            assert (a / "images" / name).read_bytes() == \
                (b / "images" / name).read_bytes()

    def test_different_seed_differs(self, runner, tmp_path):
        corpus = write_corpus(tmp_path / "seeds.jsonl", 1)
        blobs = []
        for rng_seed, d in (("1", tmp_path / "a"), ("2", tmp_path / "b")):
            result = runner.invoke(main, ["generate", "--corpus", corpus,
                                          "--mrs", "scribbling",
                                          "--rng-seed", rng_seed, "--out", str(d)])
            assert result.exit_code == 0, result.output
            (name,) = os.listdir(d / "images")
            blobs.append((d / "images" / name).read_bytes())
        assert blobs[0] != blobs[1]
