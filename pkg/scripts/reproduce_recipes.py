"""
依序執行 docs/recipes.json 的所有重現配方
執行方式（在專案根目錄）：
  python scripts/reproduce_recipes.py --output-dir ./ma_lab_output/recipes
每個配方的輸出放在各自的子目錄，最後列出結束碼。
"""
import logging
import sys
from pathlib import Path

_root = Path(__file__).resolve().parent.parent
if str(_root) not in sys.path:
    sys.path.insert(0, str(_root))

from monge_ampere_lab.cli import load_recipes, main


def reproduce(output_dir: Path, names=None) -> int:
    recipes = load_recipes()
    if names:
        recipes = [r for r in recipes if r["name"] in names]
    failures = 0
    for recipe in recipes:
        print(f"🔄 {recipe['name']}: {recipe['description']}")
        code = main(["--output-dir", str(output_dir / recipe["name"]), *recipe["argv"]], configure_logging=False)
        if code == 0:
            print(f"✅ {recipe['name']}")
        else:
            print(f"❌ {recipe['name']}（結束碼 {code}）")
            failures += 1
    print(f"📋 {len(recipes) - failures}/{len(recipes)} 個配方成功")
    return 1 if failures else 0


if __name__ == "__main__":
    import argparse
    parser = argparse.ArgumentParser(description="Reproduce every recipe in docs/recipes.json")
    parser.add_argument("--output-dir", type=Path, default=Path("./ma_lab_output/recipes"))
    parser.add_argument("names", nargs="*", help="只執行這些配方")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(reproduce(args.output_dir, args.names))
