"""Random taxonomies and corpora for property and oracle tests."""

import random

from sgreti.corpus import Corpus, ImageGraph, RelationshipInstance, SceneObject
from sgreti.lexicon import lexicon_from_mapping


def random_taxonomy(rng: random.Random, n_nouns=12, n_verbs=5, max_parents=2):
    """DAG of nouns and verbs; each synset picks 0..max_parents earlier synsets as hypernyms."""
    entries = {}
    for pos, n in (("n", n_nouns), ("v", n_verbs)):
        ids = [f"w{pos}{i}.{pos}.01" for i in range(n)]
        for i, sid in enumerate(ids):
            k = 0 if i == 0 else rng.randint(0 if rng.random() < 0.15 else 1, min(max_parents, i))
            parents = rng.sample(ids[:i], k)
            lemmas = [f"l{pos}{i}"] + ([f"shared{pos}{rng.randint(0, 3)}"] if rng.random() < 0.3 else [])
            entries[sid] = (lemmas, parents)
    return lexicon_from_mapping(entries)


def random_corpus(rng: random.Random, nouns, preds, max_images=20, max_triplets=10):
    corpus = Corpus()
    for i in range(rng.randint(1, max_images)):
        n_obj = rng.randint(2, 6)
        objects = {f"o{j}": SceneObject(f"o{j}", rng.choice(nouns), f"thing{j}") for j in range(n_obj)}
        rels = []
        for _ in range(rng.randint(1, max_triplets)):
            a, b = rng.sample(sorted(objects), 2)
            rels.append(RelationshipInstance(a, rng.choice(preds), "rel", b))
        corpus.images[f"im{i:02d}"] = ImageGraph(f"im{i:02d}", objects, tuple(rels))
    return corpus
