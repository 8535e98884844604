#!/usr/bin/env python3
"""Regenerates crates/core/fixtures/metro.graph.

Builds a metro-map-like planar graph by growing lines as momentum random
walks on an 8-neighbour lattice, then nudges the link and station counts
to 369 links / 302 stations. Deterministic for a given seed.
"""
import json
import random
import sys

W, H = 2.0, 1.96
COLS, ROWS = 28, 27
TARGET_NODES, TARGET_LINKS = 302, 369
DIRS = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]


def norm(a, b):
    return (a, b) if a < b else (b, a)


def crosses_diag(edges, a, b):
    (x0, y0), (x1, y1) = a, b
    if x0 == x1 or y0 == y1:
        return False
    return norm((x0, y1), (x1, y0)) in edges


def build(seed):
    rng = random.Random(seed)
    nodes, edges = set(), set()

    def add_edge(a, b):
        if norm(a, b) in edges or crosses_diag(edges, a, b):
            return False
        nodes.add(a)
        nodes.add(b)
        edges.add(norm(a, b))
        return True

    lines = 0
    while len(nodes) < 285:
        if nodes:
            start = rng.choice(sorted(nodes))
        else:
            start = (COLS // 2, ROWS // 2)
        d = rng.randrange(8)
        cur = start
        length = rng.randint(18, 34)
        for _ in range(length):
            if rng.random() < 0.18:
                d = (d + rng.choice([-1, 1])) % 8
            dx, dy = DIRS[d]
            nxt = (cur[0] + dx, cur[1] + dy)
            if not (0 <= nxt[0] < COLS and 0 <= nxt[1] < ROWS):
                d = (d + 4) % 8
                continue
            add_edge(cur, nxt)
            cur = nxt
        lines += 1

    def degree(n):
        return sum(1 for e in edges if n in e)

    def connected(es, ns):
        adj = {n: [] for n in ns}
        for a, b in es:
            adj[a].append(b)
            adj[b].append(a)
        seen, stack = set(), [next(iter(ns))]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(adj[n])
        return len(seen) == len(ns)

    # cycle rank: links - nodes must settle at 67
    while len(edges) - len(nodes) != TARGET_LINKS - TARGET_NODES:
        if len(edges) - len(nodes) < TARGET_LINKS - TARGET_NODES:
            a = rng.choice(sorted(nodes))
            dx, dy = rng.choice(DIRS[:4])
            b = (a[0] + dx, a[1] + dy)
            if b in nodes:
                add_edge(a, b)
        else:
            e = rng.choice(sorted(edges))
            rest = edges - {e}
            if degree(e[0]) > 1 and degree(e[1]) > 1 and connected(rest, nodes):
                edges.discard(e)
    while len(nodes) != TARGET_NODES:
        if len(nodes) < TARGET_NODES:
            a = rng.choice(sorted(nodes))
            dx, dy = rng.choice(DIRS)
            b = (a[0] + dx, a[1] + dy)
            if 0 <= b[0] < COLS and 0 <= b[1] < ROWS and b not in nodes:
                add_edge(a, b)
        else:
            leaves = sorted(n for n in nodes if degree(n) == 1)
            n = rng.choice(leaves)
            edges.difference_update([e for e in edges if n in e])
            nodes.discard(n)
    assert connected(edges, nodes)
    return nodes, edges, lines


def segs_cross(p, q, r, s):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    d1, d2 = orient(p, q, r), orient(p, q, s)
    d3, d4 = orient(r, s, p), orient(r, s, q)
    return d1 * d2 < 0 and d3 * d4 < 0


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 7
    nodes, edges, lines = build(seed)
    rng = random.Random(seed + 1)
    mx, my = 0.05 * W, 0.05 * H
    sx, sy = (W - 2 * mx) / (COLS - 1), (H - 2 * my) / (ROWS - 1)
    ordered = sorted(nodes, key=lambda n: (n[1], n[0]))
    ids = {n: i for i, n in enumerate(ordered)}
    pos = {}
    for n in ordered:
        jx = rng.uniform(-0.12, 0.12) * sx
        jy = rng.uniform(-0.12, 0.12) * sy
        pos[n] = (round(mx + n[0] * sx + jx, 4), round(my + n[1] * sy + jy, 4))
    links = sorted((ids[a], ids[b]) if ids[a] < ids[b] else (ids[b], ids[a]) for a, b in edges)
    segs = [(pos[ordered[a]], pos[ordered[b]]) for a, b in links]
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            assert not segs_cross(*segs[i], *segs[j]), (links[i], links[j])
    doc = {
        "version": 1,
        "display_extent": {"w": W, "h": H},
        "nodes": [{"id": ids[n], "x": pos[n][0], "y": pos[n][1]} for n in ordered],
        "links": [{"id": i, "a": a, "b": b, "w": 1} for i, (a, b) in enumerate(links)],
    }
    out = ['{', '  "version": 1,', f'  "display_extent": {json.dumps(doc["display_extent"])},', '  "nodes": [']
    out.append(",\n".join("    " + json.dumps(n) for n in doc["nodes"]))
    out += ['  ],', '  "links": [']
    out.append(",\n".join("    " + json.dumps(l) for l in doc["links"]))
    out += ['  ]', '}']
    print("\n".join(out))
    print(f"lines={lines} nodes={len(nodes)} links={len(edges)}", file=sys.stderr)


if __name__ == "__main__":
    main()
