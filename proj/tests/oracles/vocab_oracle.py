#!/usr/bin/env python3
"""Frequency recount of source and target vocabularies for an AMR file.

Source tokens are node labels plus one relation label per edge; target
tokens are the whitespace-split sentences. Ranked by count, then
lexicographically; the four specials come first.
"""
import re
import sys
from collections import Counter
from pathlib import Path

SPECIALS = ["<pad>", "<unk>", "<s>", "</s>"]
TOKEN = re.compile(r'\(|\)|"[^"]*"|[^\s()]+')


def labels(graph_text):
    toks = TOKEN.findall(graph_text)
    defined = {toks[i + 1] for i, t in enumerate(toks) if t == "(" }
    out = []
    i = 0
    while i < len(toks):
        t = toks[i]
        if t == "(":
            out.append(toks[i + 3])  # concept
            i += 4
            continue
        if t.startswith(":"):
            out.append(t)
            nxt = toks[i + 1]
            if nxt != "(" and nxt not in defined:
                out.append(nxt.strip('"'))
            i += 2 if nxt != "(" else 1
            continue
        i += 1
    return out


def main():
    text = Path(sys.argv[1]).read_text(encoding="utf-8")
    out_dir = Path(sys.argv[2])
    src, tgt = Counter(), Counter()
    for block in re.split(r"\n\s*\n", text.strip()):
        body = []
        for line in block.splitlines():
            m = re.search(r"# ::snt (.*)$", line)
            if m:
                tgt.update(m.group(1).split())
            elif not line.lstrip().startswith("#"):
                body.append(line)
        src.update(labels("\n".join(body)))
    for name, counts in (("src_vocab.txt", src), ("tgt_vocab.txt", tgt)):
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        (out_dir / name).write_text("\n".join(SPECIALS + [k for k, _ in ranked]) + "\n")


if __name__ == "__main__":
    main()
