"""Playful utterance detection, taxonomy classification and experiment statistics."""
from pathlib import Path

from ._core import *  # noqa: F401,F403
from ._core import Lexicons, RuleSet, TaxonomyGraph, Model


def _asset_dir():
    here = Path(__file__).resolve().parent
    for d in (here / "assets", here.parent.parent / "assets"):
        if (d / "taxonomy.v1").is_file():
            return d
    return here / "assets"


ASSET_DIR = _asset_dir()


def shipped_lexicons(asset_dir=ASSET_DIR):
    d = Path(asset_dir)
    return Lexicons.load(d / "easy_words.v1.txt", d / "sentiment.v1.tsv", d / "modifiers.v1.tsv")


def shipped_rules(asset_dir=ASSET_DIR):
    """(graph, rules) from the bundled taxonomy and ruleset."""
    d = Path(asset_dir)
    graph = TaxonomyGraph.load(d / "taxonomy.v1")
    return graph, RuleSet.load(d / "rules.v1.tsv", graph)


def shipped_model(asset_dir=ASSET_DIR):
    return Model.load(Path(asset_dir) / "model.v1.bin")
