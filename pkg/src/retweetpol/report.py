"""Report bundle assembly.

The bundle is the output directory itself; the manifest records the config
hash, master seed and package version plus which canonical tables are
present, which is enough to regenerate every downstream figure.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import __version__
from .config import Config

CANONICAL_TABLES = (
    "metrics.csv",
    "leaning_scores.csv",
    "heatmap.csv",
    "labels.csv",
    "polarization.csv",
    "core_report.json",
    "betweenness.csv",
    "ccf.csv",
)


def assemble_report(out_dir: str | Path, config: Config, master_seed: int) -> dict:
    """Write manifest.json describing the bundle; missing tables are listed
    as absent rather than failing."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tables = {
        name: ("present" if (out / name).is_file() else "absent")
        for name in CANONICAL_TABLES
    }
    manifest = {
        "package_version": __version__,
        "master_seed": master_seed,
        "config_sha256": config.sha256(),
        "tables": tables,
        "present": sum(1 for v in tables.values() if v == "present"),
        "absent": sum(1 for v in tables.values() if v == "absent"),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest
