"""Brute-force scans used as independent references for index and aggregates."""


def scan_triplets(corpus):
    for image_id in sorted(corpus.images):
        img = corpus.images[image_id]
        for rel in img.relationships:
            yield (image_id, img.objects[rel.subject_node].synset, rel.predicate_synset,
                   img.objects[rel.object_node].synset, rel.subject_node, rel.object_node)


def brute_index(corpus):
    """{(s, p, o): {image_id: [(sn, on), ...]}} in file order."""
    out = {}
    for image_id, s, p, o, sn, on in scan_triplets(corpus):
        out.setdefault((s, p, o), {}).setdefault(image_id, []).append((sn, on))
    return out


def brute_aggregate(corpus, kind):
    out = {}
    for _, s, p, o, _, _ in scan_triplets(corpus):
        key, member = {"oag": ((s, p), o), "sag": ((p, o), s), "pag": ((s, o), p)}[kind]
        out.setdefault(key, set()).add(member)
    return out


def reference_greedy(subgraphs, n_triplets):
    """Literal size-bucket reading of the greedy cover.

    ``subgraphs`` is a list of (id, covered set, total score). Each round the
    subgraphs are bucketed by how many still-unsatisfied triplets they cover;
    from the largest non-empty bucket the lowest score (then lowest id) wins.
    """
    unsatisfied = set(range(n_triplets))
    pool = {sid: (set(cov), score) for sid, cov, score in subgraphs}
    picks = []
    while unsatisfied:
        buckets = {}
        for sid, (cov, score) in pool.items():
            gain = len(cov & unsatisfied)
            if gain:
                buckets.setdefault(gain, []).append((score, sid))
        if not buckets:
            break
        _, sid = sorted(buckets[max(buckets)])[0]
        picks.append(sid)
        unsatisfied -= pool.pop(sid)[0]
    return picks


def reference_image_score(primitives, n_triplets):
    """Score one image from raw primitives without touching the ranker.

    ``primitives`` is a list of (triplet index, subject node, object node,
    {handle: distance}) with handles in role order. Components come from a
    BFS over image nodes; returns (per-triplet scores, image score).
    """
    import math

    adjacency = {}
    for i, (_, sn, on, _) in enumerate(primitives):
        for node in (sn, on):
            adjacency.setdefault(node, set()).add(i)
    seen, components = set(), []
    for start in range(len(primitives)):
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            i = stack.pop()
            comp.append(i)
            _, sn, on, _ = primitives[i]
            for j in adjacency[sn] | adjacency[on]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        components.append(comp)

    described = []
    for comp in components:
        best, handles = {}, {}
        for i in comp:
            t, _, _, dists = primitives[i]
            handles[t] = list(dists)
            for h, d in dists.items():
                best[h] = min(d, best.get(h, 1.0))
        described.append((set(handles), best, handles))

    # ids in the ranker follow sorted content; here any stable tiebreak will do as
    # long as totals differ, so callers use distinct random distances
    order = sorted(range(len(described)), key=lambda k: sum(described[k][1].values()))
    subgraphs = [(k, described[k][0], sum(described[k][1].values())) for k in order]
    picks = reference_greedy(subgraphs, n_triplets)
    scores, done = [1.0] * n_triplets, set()
    for k in picks:
        cov, best, handles = described[k]
        for t in cov - done:
            scores[t] = sum(best[h] for h in handles[t]) / 3
            done.add(t)
    return scores, math.sqrt(sum(s * s for s in scores))
