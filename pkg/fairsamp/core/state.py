import json
import logging
import shutil
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Union

from fairsamp.core.errors import ExperimentError

logger = logging.getLogger(__name__)


class ResultWriter:
    """Stages named output files in memory and writes them together.

    Nothing touches the output directory until `commit`; files are first written
    to a temporary sibling directory and then moved into place.
    """

    def __init__(self, out_dir: Union[str, Path]):
        self.path = Path(out_dir)
        self.artifacts: Dict[str, str] = {}

    def stage(self, name: str, content: str) -> None:
        if not name or '/' in name or name.startswith('.'):
            raise ExperimentError(f'invalid output file name {name!r}')
        self.artifacts[name] = content

    def stage_json(self, name: str, value: Any) -> None:
        self.stage(name, json.dumps(value, indent=2, sort_keys=True) + '\n')

    def staged(self) -> List[str]:
        return sorted(self.artifacts)

    def commit(self) -> List[Path]:
        if not self.artifacts:
            return []
        self.path.mkdir(parents=True, exist_ok=True)
        written = []
        with tempfile.TemporaryDirectory(dir=self.path, prefix='.staging-') as tmp:
            for name, content in sorted(self.artifacts.items()):
                with open(Path(tmp) / name, 'w', newline='') as f:
                    f.write(content)
            for name in sorted(self.artifacts):
                target = self.path / name
                shutil.move(str(Path(tmp) / name), str(target))
                written.append(target)
        logger.info(f'Wrote {", ".join(self.staged())} to {self.path}')
        return written
