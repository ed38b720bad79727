from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import orjson
import pendulum

from src.utils import file_digest
from .schemas import RunManifest


MANIFEST_NAME = "manifest.json"


def _now() -> str:
    return pendulum.now("UTC").to_iso8601_string()


def start_manifest(
    command: str, config: Dict[str, Any], master_seed: Optional[int] = None
) -> RunManifest:
    return RunManifest(
        command=command, config=config, master_seed=master_seed, started_at=_now()
    )


def finish_manifest(
    manifest: RunManifest, outputs: Sequence[str | Path], directory: str | Path
) -> Path:
    """Hash the outputs, stamp the finish time and write ``manifest.json`` into ``directory``."""
    finished = manifest.model_copy(
        update={
            "finished_at": _now(),
            "outputs": {Path(path).name: file_digest(str(path)) for path in outputs},
        }
    )
    path = Path(directory) / MANIFEST_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(
        orjson.dumps(
            finished.model_dump(), option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY
        )
    )
    return path


def read_manifest(path: str | Path) -> RunManifest:
    return RunManifest.model_validate(orjson.loads(Path(path).read_bytes()))
