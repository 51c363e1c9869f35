"""
執行清單
記錄命令、問題規格的 SHA-256、版本、取樣種子與輸出檔，寫在輸出旁邊
"""
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .writers import to_jsonable, write_json


def spec_digest(spec_dict: Optional[Dict]) -> Optional[str]:
    """正規化 JSON（鍵排序、無空白）的 SHA-256"""
    if spec_dict is None:
        return None
    canonical = json.dumps(to_jsonable(spec_dict), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class RunManifest:
    """
    一次 CLI 執行的清單

    不含時間戳與絕對路徑，同樣的清單應該對應到逐位元相同的輸出。
    """
    command: List[str]
    spec_digest: Optional[str]
    version: str
    seeds: Dict[str, int] = field(default_factory=lambda: {"halton_skip": 1})
    outputs: List[str] = field(default_factory=list)

    def add_output(self, path: Path) -> None:
        self.outputs.append(Path(path).name)

    def to_dict(self) -> Dict:
        return {
            "command": list(self.command),
            "spec_digest": self.spec_digest,
            "version": self.version,
            "seeds": dict(self.seeds),
            "outputs": sorted(self.outputs),
        }

    def write(self, directory: Path, stem: str) -> Path:
        return write_json(Path(directory) / f"{stem}.manifest.json", self.to_dict())
