"""Checkpoint serialization: a JSON manifest plus one float32 blob.

``model.manifest.json`` carries the config, vocab, latent tables (BKT
parameters, per-question difficulty levels and success rates), training
student ids, and the name/shape/byte-offset of every tensor;
``model.weights.bin`` is the little-endian float32 concatenation in manifest
order. Loading reproduces every parameter bit-exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from tutorstack.features.bkt import BktParams
from tutorstack.model.config import ModelConfig
from tutorstack.model.encoding import Vocab
from tutorstack.model.network import MlfbkNet

FORMAT_VERSION = 1
MANIFEST_NAME = "model.manifest.json"
WEIGHTS_NAME = "model.weights.bin"
CENTROIDS_TENSOR = "latent.centroids"


class CheckpointError(Exception):
    pass


@dataclass
class LatentTables:
    bkt_params: BktParams
    difficulty_levels: dict[str, int]
    question_success_rates: dict[str, float]
    global_success_rate: float
    centroids: np.ndarray


def save_checkpoint(
    out_dir: str | Path,
    net: MlfbkNet,
    config: ModelConfig,
    vocab: Vocab,
    latent: LatentTables,
    train_students: list[str],
) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    tensors: list[tuple[str, np.ndarray]] = [
        (name, param.detach().cpu().numpy().astype("<f4"))
        for name, param in net.state_dict().items()
    ]
    tensors.append((CENTROIDS_TENSOR, latent.centroids.astype("<f4")))

    entries = []
    offset = 0
    blob = bytearray()
    for name, arr in tensors:
        data = np.ascontiguousarray(arr).tobytes()
        entries.append({"name": name, "shape": list(arr.shape), "offset": offset})
        blob.extend(data)
        offset += len(data)

    manifest = {
        "format_version": FORMAT_VERSION,
        "config": config.to_dict(),
        "vocab": {"questions": list(vocab.questions), "skills": list(vocab.skills)},
        "latent": {
            "bkt_params": {
                "p_init": latent.bkt_params.p_init,
                "p_transit": latent.bkt_params.p_transit,
                "p_guess": latent.bkt_params.p_guess,
                "p_slip": latent.bkt_params.p_slip,
            },
            "difficulty_levels": latent.difficulty_levels,
            "question_success_rates": latent.question_success_rates,
            "global_success_rate": latent.global_success_rate,
        },
        "train_students": sorted(train_students),
        "blob_bytes": offset,
        "tensors": entries,
    }

    (out_dir / WEIGHTS_NAME).write_bytes(bytes(blob))
    (out_dir / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
    )
    return out_dir


@dataclass
class LoadedCheckpoint:
    net: MlfbkNet
    config: ModelConfig
    vocab: Vocab
    latent: LatentTables
    train_students: frozenset[str]
    manifest: dict


def load_checkpoint(path: str | Path) -> LoadedCheckpoint:
    """Load a manifest/blob pair; shapes must account for every blob byte."""
    path = Path(path)
    manifest_path = path / MANIFEST_NAME if path.is_dir() else path
    weights_path = manifest_path.parent / WEIGHTS_NAME
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read manifest {manifest_path}: {exc}") from exc
    if manifest.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported format_version {manifest.get('format_version')}")
    blob = weights_path.read_bytes()

    declared = sum(
        int(np.prod(entry["shape"])) * 4 if entry["shape"] else 4
        for entry in manifest["tensors"]
    )
    if declared != len(blob):
        raise CheckpointError(
            f"manifest declares {declared} bytes of tensors but blob has {len(blob)}"
        )

    arrays: dict[str, np.ndarray] = {}
    for entry in manifest["tensors"]:
        size = int(np.prod(entry["shape"])) if entry["shape"] else 1
        start = entry["offset"]
        arr = np.frombuffer(blob, dtype="<f4", count=size, offset=start)
        arrays[entry["name"]] = arr.reshape(entry["shape"]).copy()

    config = ModelConfig.from_dict(manifest["config"])
    vocab = Vocab(
        questions=tuple(manifest["vocab"]["questions"]),
        skills=tuple(manifest["vocab"]["skills"]),
    )
    net = MlfbkNet(config)
    state = {
        name: torch.from_numpy(arr)
        for name, arr in arrays.items()
        if name != CENTROIDS_TENSOR
    }
    net.load_state_dict(state)
    net.eval()

    lat = manifest["latent"]
    latent = LatentTables(
        bkt_params=BktParams(**lat["bkt_params"]),
        difficulty_levels={k: int(v) for k, v in lat["difficulty_levels"].items()},
        question_success_rates={k: float(v) for k, v in lat["question_success_rates"].items()},
        global_success_rate=float(lat["global_success_rate"]),
        centroids=arrays[CENTROIDS_TENSOR].astype(np.float64),
    )
    return LoadedCheckpoint(
        net=net,
        config=config,
        vocab=vocab,
        latent=latent,
        train_students=frozenset(manifest["train_students"]),
        manifest=manifest,
    )
