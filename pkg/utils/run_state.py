"""
run_metadata.json next to every output table: the normalized run spec,
seed, scheme and a digest of the run file that produced it.
"""

import hashlib
import json
import os
from typing import Any, Dict

from config import RUN_METADATA_FILE


def config_digest(config_path: str) -> str:
    """SHA-256 of the run file exactly as read from disk."""
    with open(config_path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def load_metadata(directory: str) -> Dict[str, Any]:
    path = os.path.join(directory, RUN_METADATA_FILE)
    if not os.path.exists(path):
        return {}
    with open(path, "r") as f:
        return json.load(f)


def save_metadata(directory: str, metadata: Dict[str, Any]) -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, RUN_METADATA_FILE)
    with open(path, "w") as f:
        json.dump(metadata, f, indent=2, sort_keys=True)
    return path
