import json

import pytest

from modtest.corpus import SeedRecord
from modtest.lexicon import bundled_benign_words

BANNED_WORDS = [
    "trash", "venom", "sludge", "grime", "filth", "scum", "vermin", "rot",
    "bile", "maggot", "slop", "muck", "gunk", "crud", "dreck", "mold",
    "slime", "stench", "blight", "pest",
]

SEED_TEXTS = [
    "you are trash",
    "pure venom inside",
    "total sludge pile",
    "grime everywhere now",
    "what filth here",
    "such scum talk",
    "little vermin crowd",
    "all rot within",
    "full of bile",
    "you maggot person",
    "eat my slop",
    "stuck in muck",
    "covered in gunk",
    "nothing but crud",
    "utter dreck output",
    "mold on everything",
    "drowning in slime",
    "what a stench",
    "blight on us",
    "you absolute pest",
]


def make_seeds(n):
    return [SeedRecord(seed_id=f"seed-{i:02d}", text=t)
            for i, t in enumerate(SEED_TEXTS[:n])]


@pytest.fixture(scope="session")
def benign_words():
    return bundled_benign_words()


@pytest.fixture
def seeds10():
    return make_seeds(10)


@pytest.fixture
def seeds20():
    return make_seeds(20)


@pytest.fixture
def corpus_file(tmp_path):
    """JSONL corpus file with 10 seeds."""
    path = tmp_path / "corpus.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for s in make_seeds(10):
            fh.write(json.dumps({"seed_id": s.seed_id, "text": s.text}) + "\n")
    return path
