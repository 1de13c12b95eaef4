"""Bundled fixtures: the road-speed-limit model, a small attack-record
store, and an offline CVE directory."""

from importlib.resources import files
from pathlib import Path


def _fixture(name: str) -> Path:
    return Path(str(files(__name__) / name))


def rsl_path() -> Path:
    """The road-speed-limit model document (byte-stable)."""
    return _fixture("rsl.json")


def attack_records_path() -> Path:
    """A small store of recorded attacks in the 23-category schema."""
    return _fixture("attack_records.jsonl")


def cve_dir() -> Path:
    """Directory with one JSON file per known CVE id, for offline lookup."""
    return _fixture("cves")
