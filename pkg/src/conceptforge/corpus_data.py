"""Access to the bundled snippet corpus.

Every ``.mini`` file under ``conceptforge/corpus`` holds a single
function. The corpus seeds the demo concept store and doubles as the
offline document set searched by the harvester.
"""

from __future__ import annotations

import pathlib
from importlib import resources


def corpus_path() -> pathlib.Path:
    """Directory holding the bundled .mini files."""
    root = resources.files("conceptforge") / "corpus"
    return pathlib.Path(str(root))


def snippet_names() -> list[str]:
    """Sorted stem names of every bundled snippet."""
    return sorted(p.stem for p in corpus_path().glob("*.mini"))


def load_snippet(name: str) -> str:
    """Source text of one bundled snippet, looked up by stem name."""
    target = corpus_path() / f"{name}.mini"
    if not target.is_file():
        raise KeyError(f"no bundled snippet named {name!r}")
    return target.read_text(encoding="utf-8")
