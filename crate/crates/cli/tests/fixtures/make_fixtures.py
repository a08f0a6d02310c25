"""Regenerates the CLI test fixtures.

Independent of the Rust code: the retrieval golden report is computed here
with its own ranking, recall and average-precision implementation.
"""

import json
import random
import struct
from pathlib import Path

HERE = Path(__file__).parent


def write_aemb(path, ids, rows):
    d = len(rows[0])
    with open(path, "wb") as f:
        f.write(b"AEMB")
        f.write(bytes([1]))
        f.write(struct.pack("<II", len(rows), d))
        for row in rows:
            f.write(struct.pack("<%df" % d, *row))
        f.write("\n".join(ids).encode() + b"\n")


def synthetic_corpus():
    """100 records: 20 inline-flagged (long bodies), 30 short, 50 kept."""
    out = []
    for i in range(100):
        if i % 10 in (0, 1):
            lines, inline = 8, True
        elif i % 10 in (2, 3, 4):
            lines, inline = 1 + i % 4, False
        else:
            lines, inline = 5 + i % 3, False
        body = "\n".join("s%d += a[%d];" % (k, k) for k in range(lines))
        out.append({
            "id": "syn-%03d" % i,
            "source": {
                "name": "f%d" % i,
                "language": "c",
                "body": body,
                "docstring": "* Adds up the first %d values. *\n\n* @param a input" % lines,
                "body_line_count": lines,
            },
            "assembly_text": "f%d:\n  mov eax, %d\n  add eax, edi\n  ret" % (i, i),
            "profile": {"compiler": ["gcc-7", "clang-12"][i % 2], "opt_level": "O%d" % (i % 4), "stripped": i % 3 == 0},
            "inline_flag": inline,
        })
    return out


def retrieval_fixture(rng):
    n_corpus, n_queries, d = 40, 8, 6
    # multiples of 1/8 are exact in f32, so scores are exact on both sides
    grid = lambda: [rng.randint(-8, 8) / 8 for _ in range(d)]
    corpus_ids = ["fn-%02d" % i for i in range(n_corpus)]
    corpus = [grid() for _ in range(n_corpus)]
    corpus[5] = list(corpus[3])  # a tie, broken by id
    queries, q_rows = [], []
    for q in range(n_queries):
        rel = sorted(rng.sample(corpus_ids, rng.randint(1, 4)))
        base = corpus[corpus_ids.index(rel[0])]
        q_rows.append([v + rng.randint(-2, 2) / 8 for v in base])
        queries.append({"id": "q%d" % q, "text": "query %d" % q, "relevant_ids": rel})

    def rank(qv):
        scored = [(sum(a * b for a, b in zip(qv, row)), cid) for row, cid in zip(corpus, corpus_ids)]
        scored.sort(key=lambda t: (-t[0], t[1]))
        return [cid for _, cid in scored]

    ks = [1, 5, 10, 20]
    rankings = [rank(qv) for qv in q_rows]
    recall = {}
    for k in ks:
        total = 0.0
        for r, q in zip(rankings, queries):
            rel = set(q["relevant_ids"])
            total += len(rel & set(r[:k])) / min(len(rel), k)
        recall[str(k)] = total / n_queries
    ap_total = 0.0
    for r, q in zip(rankings, queries):
        rel = set(q["relevant_ids"])
        positions = [i + 1 for i, cid in enumerate(r) if cid in rel]
        ap_total += sum((m + 1) / p for m, p in enumerate(positions)) / len(rel)
    report = {"recall_at": recall, "map": ap_total / n_queries, "n_queries": n_queries, "pool_size": n_corpus}

    write_aemb(HERE / "retrieval_corpus.aemb", corpus_ids, corpus)
    write_aemb(HERE / "retrieval_queries.aemb", [q["id"] for q in queries], q_rows)
    with open(HERE / "retrieval_queries.jsonl", "w") as f:
        for q in queries:
            f.write(json.dumps(q) + "\n")
    with open(HERE / "retrieval_golden.json", "w") as f:
        json.dump(report, f, indent=2)
        f.write("\n")


def main():
    rng = random.Random(20240601)
    with open(HERE / "synthetic_100.jsonl", "w") as f:
        for r in synthetic_corpus():
            f.write(json.dumps(r) + "\n")
    retrieval_fixture(rng)


if __name__ == "__main__":
    main()
