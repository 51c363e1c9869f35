"""
命令列介面
"""
from .main import build_parser, load_recipes, main
from .manifest import RunManifest, spec_digest
from .presets import PresetLibrary, get_preset_library
from .writers import dumps_json, format_value, write_csv, write_json

__all__ = [
    "build_parser",
    "load_recipes",
    "main",
    "RunManifest",
    "spec_digest",
    "PresetLibrary",
    "get_preset_library",
    "dumps_json",
    "format_value",
    "write_csv",
    "write_json",
]
