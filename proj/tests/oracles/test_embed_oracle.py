#!/usr/bin/env python3
# Copyright 2026 The idiomalign Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent reference for the deterministic trigram test embedder.

Prints bucket counts for a few probe strings so the C++ unit tests can
freeze them, and with --kb checks a knowledge-base fixture: for every
source-language entry it lists the target entries whose meaning cosine
reaches the threshold.
"""

import argparse
import json
import math
import string

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
SEED = 0x9E3779B97F4A7C15
MASK = (1 << 64) - 1


def fnv1a64(data: bytes, basis: int) -> int:
    h = basis
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & MASK
    return h


def ascii_lower(text: str) -> str:
    return "".join(c.lower() if "A" <= c <= "Z" else c for c in text)


def counts(text: str, dim: int) -> list[int]:
    chars = [" "] + list(ascii_lower(text)) + [" "]
    out = [0] * dim
    for i in range(len(chars) - 2):
        gram = "".join(chars[i:i + 3]).encode("utf-8")
        out[fnv1a64(gram, FNV_OFFSET ^ SEED) % dim] += 1
    return out


def embed(text: str, dim: int) -> list[float]:
    c = counts(text, dim)
    norm = math.sqrt(sum(x * x for x in c))
    return [x / norm for x in c]


def cosine(u, v) -> float:
    return sum(a * b for a, b in zip(u, v)) / math.sqrt(
        sum(a * a for a in u) * sum(b * b for b in v))


def meaning_key(text: str) -> str:
    t = " ".join(ascii_lower(text).split())
    strip = string.punctuation + " "
    return t.strip(strip)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=64)
    ap.add_argument("--kb")
    ap.add_argument("--source", default="en")
    ap.add_argument("--target", default="zh")
    ap.add_argument("--threshold", type=float, default=0.7)
    args = ap.parse_args()

    if not args.kb:
        for probe in ["hello", "Kick the bucket", "坐失良机", "a"]:
            print(json.dumps({"text": probe, "dim": args.dim,
                              "counts": counts(probe, args.dim)}, ensure_ascii=False))
        fnv = fnv1a64(b"abc", FNV_OFFSET)
        print(json.dumps({"fnv1a64_abc": f"{fnv:016x}"}))
        return

    entries = [json.loads(line) for line in open(args.kb, encoding="utf-8") if line.strip()]
    targets = [e for e in entries if e["language"] == args.target]
    tvecs = [embed(meaning_key(e["meaning_en"]), args.dim) for e in targets]
    for e in entries:
        if e["language"] != args.source:
            continue
        q = embed(meaning_key(e["meaning_en"]), args.dim)
        hits = sorted(((cosine(q, v), t["idiom"]) for t, v in zip(targets, tvecs)),
                      reverse=True)
        above = [(round(s, 4), i) for s, i in hits if s >= args.threshold]
        print(e["id"], e["idiom"], "->", above, "best", round(hits[0][0], 4))


if __name__ == "__main__":
    main()
