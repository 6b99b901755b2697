import itertools

import pytest

from modtest.canvas import decode_image
from modtest.corpus import SeedRecord
from modtest.errors import CompositionError
from modtest.models import PerturbationSpec
from modtest.mrs.pipeline import (ALL_MR_IDS, MR_REGISTRY, apply_chain,
                                  mr_level, validate_chain)

LEVEL_RANK = {"char": 0, "paragraph": 1, "picture": 2}


def pair_is_valid(a: str, b: str) -> bool:
    """Independent statement of the chain rule for length-2 chains."""
    ra, rb = LEVEL_RANK[mr_level(a)], LEVEL_RANK[mr_level(b)]
    if ra > rb:
        return False
    if ra == rb == 1:  # at most one layout perturbation per chain
        return False
    if a == "to-gif":  # animation must come last
        return False
    return True


class TestChainRule:
    def test_registry_is_complete(self):
        assert len(ALL_MR_IDS) == 21
        by_level = {lvl: [m for m in ALL_MR_IDS if mr_level(m) == lvl]
                    for lvl in ("char", "paragraph", "picture")}
        assert len(by_level["char"]) == 5
        assert len(by_level["paragraph"]) == 7
        assert len(by_level["picture"]) == 9

    def test_all_ordered_pairs_classified(self):
        valid = 0
        for a, b in itertools.product(ALL_MR_IDS, repeat=2):
            expected = pair_is_valid(a, b)
            try:
                validate_chain([a, b])
                ok = True
            except CompositionError:
                ok = False
            assert ok == expected, (a, b)
            valid += ok
        assert valid == 240

    def test_documented_invalid_examples(self):
        with pytest.raises(CompositionError):
            validate_chain(["mirror", "font-color"])
        with pytest.raises(CompositionError):
            validate_chain(["circle", "vertical"])

    def test_gif_only_terminal_in_triples(self):
        validate_chain(["font-change", "circle", "to-gif"])
        with pytest.raises(CompositionError):
            validate_chain(["font-change", "to-gif", "mirror"])

    def test_empty_chain_rejected(self):
        with pytest.raises(CompositionError):
            validate_chain([])


@pytest.fixture()
def seeds():
    return [SeedRecord(seed_id=f"s{i}", text=t) for i, t in
            enumerate(("you are trash", "pure venom inside", "all rot within"))]


class TestChainExecution:
    def test_every_valid_pair_generates(self, seeds, benign_words):
        count = 0
        for a, b in itertools.product(ALL_MR_IDS, repeat=2):
            if not pair_is_valid(a, b):
                continue
            count += 1
            if count % 7:  # sample evenly; the full 240x3 sweep is acceptance work
                continue
            for seed in seeds:
                specs = [PerturbationSpec(a, rng_seed=1), PerturbationSpec(b, rng_seed=2)]
                data, fmt, _, _ = apply_chain(seed, specs,
                                              benign_words=benign_words,
                                              toxic_lexicon=["trash", "venom", "rot"])
                frames = decode_image(data)
                assert frames and frames[0].width > 0
                assert fmt == ("gif" if b == "to-gif" else "png")
        assert count == 240

    def test_chain_order_matters(self, benign_words):
        seed = SeedRecord(seed_id="o", text="you are trash")
        a = apply_chain(seed, [PerturbationSpec("font-color"), PerturbationSpec("mirror")],
                        benign_words=benign_words)
        b = apply_chain(seed, [PerturbationSpec("mirror")], benign_words=benign_words)
        assert a[0] != b[0]
