import json

import numpy as np
import pytest

import clear_aqa as ca


def test_vocabulary():
    v = ca.vocabulary()
    assert len(v) == 47
    assert len(set(v)) == 47
    assert v[:2] == ["yes", "no"]


def test_scene_render_and_spectrogram():
    scene = ca.compose_scene(3, 11)
    assert len(scene["sounds"]) == 10
    assert 50.0 <= scene["reverb_time_ms"] <= 400.0
    w = ca.render_scene(scene)
    assert w.dtype == np.float32
    assert w.shape == (ca.SCENE_SAMPLES,)
    assert np.max(np.abs(w)) == pytest.approx(10 ** (-1 / 20), rel=1e-4)
    img = ca.spectrogram(w)
    assert img.shape == (320, 480)
    assert 0.0 <= img.min() and img.max() <= 1.0


def test_tone_spectrogram_row():
    t = np.arange(2 * ca.SAMPLE_RATE) / ca.SAMPLE_RATE
    img = ca.spectrogram(0.5 * np.sin(2 * np.pi * 3000.0 * t))
    row_from_bottom = 319 - int(np.argmax(img.sum(axis=1)))
    assert abs((row_from_bottom + 0.5) * 75.0 - 3000.0) <= 75.0


def test_questions_execute_and_score():
    scene = ca.compose_scene(0, 1)
    qs = ca.generate_questions(scene, 10, seed=5)
    assert len(qs) == 10
    for q in qs:
        assert ca.execute(q["program"], scene) == q["answer"]
        assert q["answer"] in ca.vocabulary()
    report = ca.score({q["question_id"]: q["answer"] for q in qs}, qs)
    assert report["overall_accuracy"] == 1.0
    report = ca.score({}, qs)
    assert report["overall_accuracy"] == 0.0
    assert report["n_missing"] == 10
    rnd = ca.baseline_random(qs, seed=1, n_trials=3)
    assert len(rnd["trials"]) == 3
    assert ca.baseline_majority(qs, qs)["answer"] in ca.vocabulary()


def test_dataset_round_trip(tmp_path):
    out = tmp_path / "ds"
    manifest = ca.generate_dataset(
        n_scenes=10, questions_per_scene=4, master_seed=2, output_dir=out,
        render_audio=False, render_spectrograms=False,
    )
    assert [manifest["counts"][k]["scenes"] for k in ("train", "val", "test")] == [7, 1, 2]
    report = ca.verify_dataset(out)
    assert report["violations"] == []
    qs = ca.read_questions(out / "questions_train.jsonl")
    assert len(qs) == 28


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        ca.generate_dataset(n_scenes=3)
    with pytest.raises(OSError):
        ca.verify_dataset("/nonexistent/dataset")
    scene = ca.compose_scene(0, 1)
    with pytest.raises(ValueError):
        ca.execute([{"kind": "scene", "inputs": []}], scene)
    with pytest.raises(ValueError):
        ca.baseline_random([], n_trials=0)
    assert json.loads(json.dumps(scene)) == scene
