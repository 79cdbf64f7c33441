"""Reproducibility manifests: every output directory gets a manifest.json
recording the run config, seed, tool version, and sha256 of each input."""

import hashlib
import json
from pathlib import Path

from . import __version__

MANIFEST_NAME = "manifest.json"


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, config, seed, inputs):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "tool_version": __version__,
        "seed": seed,
        "config": config,
        "inputs": {str(p): file_sha256(p) for p in inputs},
    }
    with open(out_dir / MANIFEST_NAME, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
    return manifest


def read_manifest(out_dir):
    with open(Path(out_dir) / MANIFEST_NAME, encoding="utf-8") as f:
        return json.load(f)


def verify_manifest(out_dir):
    """Re-hash the recorded inputs. Returns a list of mismatch descriptions
    (empty when everything still matches)."""
    manifest = read_manifest(out_dir)
    problems = []
    for path, expected in manifest.get("inputs", {}).items():
        p = Path(path)
        if not p.exists():
            problems.append(f"missing input: {path}")
        elif file_sha256(p) != expected:
            problems.append(f"hash mismatch: {path}")
    return problems
