"""Word lists: the bundled benign lexicon and user-supplied lexicon files."""

from __future__ import annotations

from importlib import resources


def load_wordlist(path: str) -> list[str]:
    """UTF-8 file, one word per line; blank lines ignored."""
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def bundled_benign_words() -> list[str]:
    text = resources.files("modtest.data").joinpath("benign_words.txt").read_text("utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]
