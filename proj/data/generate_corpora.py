#!/usr/bin/env python3
"""Writes the synthetic corpora used by the overfit and direction tests.

synthetic30.amr: 30 graphs, each sentence a fixed function of its graph.
paths.amr: directed label paths; the sentence walks the path from the root.

Deterministic: rerunning reproduces the files byte for byte.
"""
import random
import sys
from pathlib import Path

VERBS = {"want-01": "wants", "see-01": "sees", "like-01": "likes", "find-01": "finds", "help-01": "helps"}
NESTED = {"go-01": "to go", "eat-01": "to eat", "sleep-01": "to sleep", "read-01": "to read"}
NOUNS = ["boy", "girl", "dog", "cat", "teacher", "bird"]
OBJECTS = ["apple", "book", "ball", "house"]
ADJS = ["big", "small", "red", "happy"]


class Builder:
    def __init__(self):
        self.used = set()

    def var(self, label):
        base = label[0]
        v, k = base, 2
        while v in self.used:
            v, k = f"{base}{k}", k + 1
        self.used.add(v)
        return v


def noun_phrase(b, rng, pool):
    noun = rng.choice(pool)
    v = b.var(noun)
    if rng.random() < 0.4:
        adj = rng.choice(ADJS)
        return f"({v} / {noun} :mod ({b.var(adj)} / {adj}))", ["the", adj, noun], v, 2
    return f"({v} / {noun})", ["the", noun], v, 1


def synthetic_example(rng):
    b = Builder()
    verb = rng.choice(sorted(VERBS))
    root = b.var(verb)
    subj, subj_words, subj_var, subj_nodes = noun_phrase(b, rng, NOUNS)
    nodes = 1 + subj_nodes
    if verb == "want-01" or rng.random() < 0.3:
        nested = rng.choice(sorted(NESTED))
        nv = b.var(nested)
        if verb == "want-01":
            # The wanter is also the goer: a reentrancy.
            inner = f"({nv} / {nested} :ARG0 {subj_var})"
            words = subj_words + [VERBS[verb]] + NESTED[nested].split()
            nodes += 1
        else:
            obj, obj_words, _, obj_nodes = noun_phrase(b, rng, NOUNS)
            inner = f"({nv} / {nested} :ARG0 {obj})"
            words = subj_words + [VERBS[verb]] + obj_words + NESTED[nested].split()
            nodes += 1 + obj_nodes
        graph = f"({root} / {verb} :ARG0 {subj} :ARG1 {inner})"
    else:
        obj, obj_words, _, obj_nodes = noun_phrase(b, rng, OBJECTS)
        graph = f"({root} / {verb} :ARG0 {subj} :ARG1 {obj})"
        words = subj_words + [VERBS[verb]] + obj_words
        nodes += obj_nodes
    return graph, " ".join(words), nodes


def write_synthetic(path, count=30, seed=7):
    rng = random.Random(seed)
    seen = set()
    blocks = []
    while len(blocks) < count:
        graph, sentence, nodes = synthetic_example(rng)
        if sentence in seen or nodes > 10 or len(sentence.split()) > 12:
            continue
        seen.add(sentence)
        blocks.append(f"# ::id synth.{len(blocks) + 1}\n# ::snt {sentence}\n{graph}\n")
    path.write_text("\n".join(blocks))


COLORS = ["red", "green", "blue", "black", "white", "gold"]


def write_paths(path, count=24, seed=11):
    rng = random.Random(seed)
    seen = set()
    blocks = []
    while len(blocks) < count:
        length = rng.choice([2, 3, 4])
        labels = rng.sample(COLORS, length)
        if tuple(labels) in seen:
            continue
        seen.add(tuple(labels))
        graph = ""
        for i, label in reversed(list(enumerate(labels))):
            node = f"(n{i} / {label}"
            graph = f"{node} :next {graph})" if graph else f"{node})"
        sentence = " ".join(["from"] + labels[:1] + ["to"] + labels[1:])
        blocks.append(f"# ::id path.{len(blocks) + 1}\n# ::snt {sentence}\n{graph}\n")
    path.write_text("\n".join(blocks))


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent
    write_synthetic(out / "synthetic30.amr")
    write_paths(out / "paths.amr")


if __name__ == "__main__":
    main()
