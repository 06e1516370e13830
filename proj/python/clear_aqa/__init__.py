"""Acoustic question answering dataset generator and evaluation toolkit."""

import json
from os import PathLike

import numpy as np

from . import _core
from ._core import (
    SAMPLE_RATE,
    SCENE_SAMPLES,
    InvalidArgument,
    InvalidBinding,
    IoError,
    StructuralError,
    ValidationError,
)

__all__ = [
    "SAMPLE_RATE",
    "SCENE_SAMPLES",
    "InvalidArgument",
    "InvalidBinding",
    "IoError",
    "StructuralError",
    "ValidationError",
    "vocabulary",
    "compose_scene",
    "render_scene",
    "spectrogram",
    "generate_questions",
    "execute",
    "generate_dataset",
    "verify_dataset",
    "read_questions",
    "score",
    "baseline_random",
    "baseline_majority",
]


def vocabulary() -> list[str]:
    return _core.vocabulary()


def compose_scene(scene_id: int, master_seed: int) -> dict:
    return json.loads(_core.compose_scene(scene_id, master_seed))


def render_scene(scene: dict, reverb: bool = True) -> np.ndarray:
    """Mono float32 waveform at 48 kHz, synthesized sounds."""
    return _core.render_scene(json.dumps(scene), reverb)


def spectrogram(samples) -> np.ndarray:
    """(320, 480) float32 image in [0, 1]; row 0 is the highest band."""
    return _core.spectrogram(np.asarray(samples, dtype=np.float32))


def generate_questions(scene: dict, n: int, seed: int, cap_fraction: float = 0.5) -> list[dict]:
    return json.loads(_core.generate_questions(json.dumps(scene), n, seed, cap_fraction))


def execute(program: list[dict], scene: dict) -> str | None:
    """Answer string, or None when the program is ill-posed on the scene."""
    return _core.execute(json.dumps(program), json.dumps(scene))


def generate_dataset(**config) -> dict:
    """Keys as in the JSON config file (n_scenes, output_dir, ...)."""
    if "output_dir" in config:
        config["output_dir"] = str(config["output_dir"])
    return json.loads(_core.generate_dataset(json.dumps(config)))


def verify_dataset(path: str | PathLike, workers: int = 1) -> dict:
    return json.loads(_core.verify_dataset(str(path), workers))


def read_questions(path: str | PathLike) -> list[dict]:
    return json.loads(_core.read_questions(str(path)))


def score(predictions: dict[int, str] | list[dict], gold: list[dict]) -> dict:
    if isinstance(predictions, dict):
        pairs = list(predictions.items())
    else:
        pairs = [(p["question_id"], p["answer"]) for p in predictions]
    return json.loads(_core.score(pairs, json.dumps(gold)))


def baseline_random(gold: list[dict], seed: int = 0, n_trials: int = 10) -> dict:
    return json.loads(_core.baseline_random(json.dumps(gold), seed, n_trials))


def baseline_majority(train: list[dict], gold: list[dict]) -> dict:
    return json.loads(_core.baseline_majority(json.dumps(train), json.dumps(gold)))
