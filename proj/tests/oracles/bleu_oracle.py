#!/usr/bin/env python3
"""Reference corpus BLEU-4 (single reference, no smoothing, lowercased).

`bleu_oracle.py cases` prints the fixed worked examples.
`bleu_oracle.py random <dir>` writes a seeded random corpus pair and the
expected score, for cross-checking the C++ scorer.
"""
import math
import random
import sys
from collections import Counter
from fractions import Fraction
from pathlib import Path


def ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(refs, hyps):
    matches = [0] * 4
    totals = [0] * 4
    hyp_len = ref_len = 0
    for ref, hyp in zip(refs, hyps):
        r, h = ref.lower().split(), hyp.lower().split()
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, 5):
            hc, rc = ngrams(h, n), ngrams(r, n)
            matches[n - 1] += sum(min(c, rc[g]) for g, c in hc.items())
            totals[n - 1] += max(0, len(h) - n + 1)
    if min(matches) == 0:
        return 0.0, matches, totals
    precision = Fraction(1)
    for m, t in zip(matches, totals):
        precision *= Fraction(m, t)
    bp = 1.0 if hyp_len >= ref_len else math.exp(1 - ref_len / hyp_len)
    return 100.0 * bp * float(precision) ** 0.25, matches, totals


CASES = [
    ("the cat sat on the mat", "the cat on the mat"),
    ("the cat sat on the mat", "the cat sat on a mat"),
    ("the cat sat on the mat", "the cat sat on the"),
    ("the quick brown fox jumps over the lazy dog", "the quick brown fox jumped over the dog"),
]


def main():
    if sys.argv[1] == "cases":
        for ref, hyp in CASES:
            score, m, t = bleu([ref], [hyp])
            print("%s\t%s\t%.6f\t%s" % (ref, hyp, score, " ".join("%d/%d" % x for x in zip(m, t))))
    elif sys.argv[1] == "random":
        out = Path(sys.argv[2])
        rng = random.Random(2024)
        words = "a the cat dog sat ran on under mat rug big small and".split()
        refs, hyps = [], []
        for _ in range(200):
            ref = [rng.choice(words) for _ in range(rng.randint(3, 15))]
            hyp = [w if rng.random() < 0.7 else rng.choice(words) for w in ref]
            if rng.random() < 0.3:
                del hyp[rng.randrange(len(hyp))]
            refs.append(" ".join(ref))
            hyps.append(" ".join(hyp).upper() if rng.random() < 0.1 else " ".join(hyp))
        (out / "bleu_random.refs").write_text("\n".join(refs) + "\n")
        (out / "bleu_random.hyps").write_text("\n".join(hyps) + "\n")
        (out / "bleu_random.expected").write_text("%.10f\n" % bleu(refs, hyps)[0])


if __name__ == "__main__":
    main()
