#!/usr/bin/env python3
"""Build the two desk-scale JSONLines corpora used by the acceptance suite.

class_a.jsonl: paragraphs of software license and copyright notices
               (Debian copyright files). Tagged with the "adult" annotation so
               that it plays the role of the target class.
class_b.jsonl: paragraphs of the Python language reference (pydoc topics)
               mixed with Debian changelog entries. No annotation.

Both sources ship with a stock Debian/Ubuntu image. Output is deterministic for
a given set of input files.
"""
import argparse
import glob
import gzip
import json
import random
import re

TARGET_BYTES = 1_000_000
MIN_DOC, MAX_DOC = 300, 1500


def paragraphs(text):
    for block in re.split(r"\n\s*\n", text):
        block = " ".join(block.split())
        if len(block) >= 40:
            yield block


def pack(paras, seen):
    """Greedily pack unique paragraphs into documents of MIN_DOC..MAX_DOC bytes."""
    doc = []
    size = 0
    for p in paras:
        if p in seen:
            continue
        seen.add(p)
        doc.append(p)
        size += len(p.encode("utf-8")) + 1
        if size >= MIN_DOC:
            yield "\n".join(doc)[: MAX_DOC * 2]
            doc, size = [], 0
    if size >= MIN_DOC:
        yield "\n".join(doc)


def take(docs, budget):
    out, total = [], 0
    for d in docs:
        if total >= budget:
            break
        out.append(d)
        total += len(d.encode("utf-8"))
    return out


def class_a():
    seen = set()
    docs = []
    for path in sorted(glob.glob("/usr/share/doc/*/copyright")):
        with open(path, encoding="utf-8", errors="replace") as f:
            docs.extend(pack(paragraphs(f.read()), seen))
    random.Random(11).shuffle(docs)
    return take(docs, TARGET_BYTES)


def class_b():
    from pydoc_data.topics import topics

    seen = set()
    ref = []
    for key in sorted(topics):
        ref.extend(pack(paragraphs(topics[key]), seen))
    logs = []
    for path in sorted(glob.glob("/usr/share/doc/*/changelog.Debian.gz")):
        with gzip.open(path, "rt", encoding="utf-8", errors="replace") as f:
            text = f.read()
        entries = re.split(r"\n(?=\S+ \([^)]*\) [^;]*; urgency=)", text)
        for e in entries[:6]:
            e = " ".join(e.split())
            if len(e) >= MIN_DOC and e not in seen:
                seen.add(e)
                logs.append(e[:MAX_DOC])
    rng = random.Random(13)
    rng.shuffle(ref)
    rng.shuffle(logs)
    docs = take(ref, TARGET_BYTES * 6 // 10) + take(logs, TARGET_BYTES * 4 // 10)
    rng.shuffle(docs)
    return docs


def write(path, docs, prefix, annotation):
    with open(path, "w", encoding="utf-8") as f:
        for i, d in enumerate(docs, 1):
            obj = {"id": f"{prefix}-{i:05d}", "content": d}
            if annotation:
                obj["metadata"] = {"annotation": [annotation]}
            f.write(json.dumps(obj, ensure_ascii=False) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="tests/data/desk")
    args = ap.parse_args()
    write(f"{args.out}/class_a.jsonl", class_a(), "a", "adult")
    write(f"{args.out}/class_b.jsonl", class_b(), "b", None)


if __name__ == "__main__":
    main()
