#!/usr/bin/env python3
"""Convert the PDDL-licensed pattern/TextBlob adjective lexicon (en-sentiment.xml)
into the tab-separated sentiment and modifier assets.

Usage: build_sentiment_lexicon.py en-sentiment.xml assets/
"""
import collections
import pathlib
import re
import sys
import xml.etree.ElementTree as ET

NEGATORS = [
    "not", "no", "never", "nor", "neither", "cannot", "dont", "doesnt", "didnt",
    "isnt", "arent", "wasnt", "werent", "cant", "couldnt", "wont", "wouldnt",
    "shouldnt", "aint", "hardly",
]


def main(xml_path: str, out_dir: str) -> None:
    root = ET.parse(xml_path).getroot()
    pol = collections.defaultdict(list)
    subj = collections.defaultdict(list)
    intens = collections.defaultdict(list)
    for w in root.iter("word"):
        form = w.get("form", "").lower()
        if not re.fullmatch(r"[a-z]+", form):
            continue
        pol[form].append(float(w.get("polarity", "0")))
        subj[form].append(float(w.get("subjectivity", "0")))
        if w.get("pos", "").startswith("RB") and float(w.get("intensity", "1")) != 1.0:
            intens[form].append(float(w.get("intensity")))

    out = pathlib.Path(out_dir)
    with open(out / "sentiment.v1.tsv", "w", encoding="utf-8") as f:
        f.write("# sentiment lexicon v1: word<TAB>polarity<TAB>subjectivity\n")
        f.write("# derived from the pattern en-sentiment lexicon (PDDL), per-sense mean\n")
        for form in sorted(pol):
            if form in NEGATORS:
                continue
            p = sum(pol[form]) / len(pol[form])
            s = sum(subj[form]) / len(subj[form])
            f.write(f"{form}\t{p:.4f}\t{s:.4f}\n")
    with open(out / "modifiers.v1.tsv", "w", encoding="utf-8") as f:
        f.write("# sentiment modifiers v1\n")
        for n in NEGATORS:
            f.write(f"negator\t{n}\n")
        for form in sorted(intens):
            m = sum(intens[form]) / len(intens[form])
            f.write(f"intensifier\t{form}\t{m:.4f}\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
