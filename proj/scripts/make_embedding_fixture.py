"""Reference signed-hash n-gram embeddings computed independently in Python.

    python scripts/make_embedding_fixture.py > tests/fixtures/embedding_oracle.json
"""
import json
import math


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def embed(text, dim, lo, hi, truncation=128):
    s = text[:truncation].translate({c: c + 32 for c in range(ord("A"), ord("Z") + 1)})
    v = [0.0] * dim
    for n in range(lo, hi + 1):
        for i in range(len(s) - n + 1):
            h = fnv1a64(s[i:i + n].encode("utf-8"))
            v[h % dim] += -1.0 if h >> 63 else 1.0
    norm = math.sqrt(sum(x * x for x in v))
    return [x / norm for x in v] if norm > 0 else v


CASES = [
    ("abc", 16, 2, 3),
    ("What do you do for fun?", 32, 2, 4),
    ("ÇA va", 8, 1, 2),
]


def main():
    out = [{"text": t, "dim": d, "ngramMin": lo, "ngramMax": hi, "values": embed(t, d, lo, hi)} for t, d, lo, hi in CASES]
    fnv = {s: format(fnv1a64(s.encode("utf-8")), "x") for s in ["", "a", "ab", "foobar"]}
    print(json.dumps({"embeddings": out, "fnv1a64": fnv}, indent=1))


if __name__ == "__main__":
    main()
