#!/usr/bin/env python3
"""Regenerate the golden canonical N-Triples files in tests/golden/.

The figure builders use fixed seeds, so this script is deterministic;
rerunning it must leave the files byte-identical unless the model's
graph mapping intentionally changed. Run from the repository root:

    python3 scripts/make_golden.py
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from annokit.model import to_graph
from annokit.rdf import serialize_ntriples_canonical

import figures


def main() -> int:
    out_dir = ROOT / "tests" / "golden"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, build in figures.FIGURES.items():
        path = out_dir / f"{name}.nt"
        text = serialize_ntriples_canonical(to_graph(build()))
        changed = not path.exists() or path.read_text(encoding="utf-8") != text
        path.write_text(text, encoding="utf-8")
        print(f"{'wrote  ' if changed else 'stable '}{path.relative_to(ROOT)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
