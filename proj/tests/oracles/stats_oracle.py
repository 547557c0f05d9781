#!/usr/bin/env python3
"""Independent recount of corpus statistics for an AMR file.

Own PENMAN reader, all-pairs BFS diameter, DFS-colouring cycle test.
Prints the same TSV layout as `dualgraph stats`.
"""
import re
import sys
from collections import deque

TOKEN = re.compile(r'\(|\)|"[^"]*"|[^\s()]+')
TOP = 20


def read_blocks(text):
    blocks, current = [], []
    for line in text.splitlines():
        if line.strip():
            current.append(line)
        elif current:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)
    return blocks


def parse_graph(text):
    """Returns (node_count, edges as (src, dst) pairs)."""
    toks = TOKEN.findall(text)
    variables = {}
    nodes = 0
    edges = []
    pending = []  # (src, variable name) resolved after the walk
    pos = 0

    def node():
        nonlocal pos, nodes
        assert toks[pos] == "("
        var = toks[pos + 1]
        assert toks[pos + 2] == "/"
        me = nodes
        nodes += 1
        variables[var] = me
        pos += 4  # "(", var, "/", concept
        while toks[pos] != ")":
            assert toks[pos].startswith(":"), toks[pos]
            pos += 1
            if toks[pos] == "(":
                child = node()
                edges.append((me, child))
            else:
                pending.append((me, toks[pos], len(edges)))
                edges.append(None)
                pos += 1
        pos += 1
        return me

    node()
    for src, atom, slot in pending:
        if atom in variables:
            edges[slot] = (src, variables[atom])
        else:
            edges[slot] = (src, nodes)
            nodes += 1
    return nodes, edges


def diameter(n, edges):
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    best = 0
    for s in range(n):
        dist = {s: 0}
        q = deque([s])
        while q:
            u = q.popleft()
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    q.append(v)
        best = max(best, max(dist.values()))
    return best


def acyclic(n, edges):
    out = [[] for _ in range(n)]
    for a, b in edges:
        out[a].append(b)
    colour = [0] * n

    def visit(u):
        colour[u] = 1
        for v in out[u]:
            if colour[v] == 1 or (colour[v] == 0 and not visit(v)):
                return False
        colour[u] = 2
        return True

    return all(colour[u] or visit(u) for u in range(n))


def main():
    text = open(sys.argv[1], encoding="utf-8").read()
    rows = {k: [] for k in ("nodes", "edges", "diameter", "degree", "sentence_length")}
    dag = non_dag = 0
    hist_d = [0] * (TOP + 1)
    hist_g = [0] * (TOP + 1)
    for block in read_blocks(text):
        sentence = ""
        body = []
        for line in block:
            if line.lstrip().startswith("#"):
                m = re.search(r"::snt (.*)$", line)
                if m:
                    sentence = m.group(1)
            else:
                body.append(line)
        n, edges = parse_graph("\n".join(body))
        rows["nodes"].append(n)
        rows["edges"].append(len(edges))
        d = diameter(n, edges)
        rows["diameter"].append(d)
        hist_d[min(d, TOP)] += 1
        degree = [0] * n
        for a, b in edges:
            degree[a] += 1
            degree[b] += 1
        for g in degree:
            rows["degree"].append(g)
            hist_g[min(g, TOP)] += 1
        rows["sentence_length"].append(len(sentence.split()))
        if acyclic(n, edges):
            dag += 1
        else:
            non_dag += 1

    out = ["statistic\tmin\tmean\tmax"]
    for name, values in rows.items():
        out.append("%s\t%.0f\t%.4f\t%.0f" % (name, min(values), sum(values) / len(values), max(values)))
    out += ["count\tvalue", "instances\t%d" % (dag + non_dag), "dag\t%d" % dag, "non_dag\t%d" % non_dag]
    for name, hist in (("diameter", hist_d), ("degree", hist_g)):
        out += ["histogram\t" + name, "bucket_low\tbucket_high\tcount"]
        out += ["%d\t%d\t%d" % (k, k + 1, c) for k, c in enumerate(hist)]
    sys.stdout.write("\n".join(out) + "\n")


if __name__ == "__main__":
    main()
