import os
import re
import signal
import subprocess

import pytest
import scipy.stats

import irispad


def test_class_and_variant_order():
    assert irispad.classes()[0] == "live"
    assert len(irispad.classes()) == 8
    assert irispad.variants()[0] == "short+none"
    assert irispad.variants()[-1] == "long+gemini_mesh"


def test_prompts():
    assert "float number from 0 to 1" in irispad.render_short()
    assert irispad.render_long().startswith("Role and Task:")
    assert irispad.render_variant("short+none") == irispad.render_short()


def test_aggregate_mse_published_row():
    assert round(irispad.aggregate_mse([0.0, 0.769, 0.700, 0.833, 0.833, 0.267, 0.833, 0.300]), 3) == 0.416
    assert irispad.aggregate_mse([1.0] + [0.0] * 7) == 0.125


def test_error_carries_code():
    with pytest.raises(irispad.IrispadError) as info:
        irispad.aggregate_mse([0.1] * 7)
    assert info.value.code == "InvalidArgument"
    assert info.value.subject == "rates"


def test_extract_confidence():
    assert irispad.extract_confidence("Confidence: 0.85\nClassification: attack") == 0.85
    assert irispad.extract_confidence("no number here") is None


def test_rank_tests_agree_with_scipy():
    x = [0.91, 0.12, 0.55, 0.73, 0.38, 0.64, 0.27, 0.82]
    y = [0.41, 0.33, 0.15, 0.70, 0.02, 0.29, 0.58, 0.07]
    ours = irispad.wilcoxon(x, y, method="exact")
    ref = scipy.stats.wilcoxon(x, y, method="exact")
    assert ours["p_value"] == pytest.approx(ref.pvalue, abs=1e-12)

    ours = irispad.mann_whitney(x, y, method="exact")
    ref = scipy.stats.mannwhitneyu(x, y, method="exact", alternative="two-sided")
    assert ours["statistic"] == ref.statistic
    assert ours["p_value"] == pytest.approx(ref.pvalue, abs=1e-12)


def test_gelu_and_projection():
    assert irispad.gelu(0.0) == 0.0
    assert irispad.gelu(1.0) == pytest.approx(0.841345, abs=1e-6)
    scores, ratios = irispad.pca_project([[0, 0], [1, 0], [2, 0], [3, 1e-9]], k=1)
    assert ratios[0] == pytest.approx(1.0)
    assert len(scores) == 4


def test_mock_round_trip(tmp_path):
    config, script = irispad.make_fixture(tmp_path, model="gemini", seed=3)
    with irispad.MockServer(script) as server:
        text = open(config).read().replace("http://127.0.0.1:8765", server.base_url)
        open(config, "w").write(text)
        first = irispad.run(config, limit=500)
        assert first["interrupted"]
        assert first["written"] + first["failed"] == 500
        second = irispad.run(config)
        assert second["skipped"] == first["written"]
    rows = irispad.score(first["store"], tmp_path / "report")
    assert round(rows["short+none"]["mse"], 3) == 0.416
    assert round(rows["long+human"]["mse"], 3) == 0.053
    assert (tmp_path / "report" / "rates.csv").exists()

    converged = irispad.curve(first["store"], tmp_path / "report", seed=1)
    assert set(converged) == set(irispad.variants())


def test_embed(tmp_path):
    path = tmp_path / "emb.csv"
    irispad.write_mixed_embeddings(path, per_class=6, image_dim=32)
    report = irispad.embed(path, output_dir=tmp_path, hidden_dim=32, output_dim=16)
    assert report["silhouette_fused"] > report["silhouette_image"]
    assert (tmp_path / "embed_fused.svg").exists()


@pytest.mark.skipif("IRISPAD_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_error_line(tmp_path):
    proc = subprocess.run([os.environ["IRISPAD_CLI"], "score", "--store", str(tmp_path / "none.txt")],
                          capture_output=True, text=True)
    assert proc.returncode != 0
    assert re.match(r"^error \| EmptyStore \| .+ \| ", proc.stderr)


def test_cli_mock_serve_stops_on_sigterm(tmp_path):
    script = tmp_path / "script.txt"
    script.write_text("* | * | text | 0.5\n")
    proc = subprocess.Popen([os.environ["IRISPAD_CLI"], "mock-serve", "--script", str(script), "--port", "0"],
                            stdout=subprocess.PIPE, text=True)
    try:
        assert proc.stdout.readline().startswith("listening | http://127.0.0.1:")
        proc.send_signal(signal.SIGTERM)
        out, _ = proc.communicate(timeout=10)
    finally:
        if proc.poll() is None:
            proc.kill()
    assert proc.returncode == 0
    assert out.startswith("served | 0")
