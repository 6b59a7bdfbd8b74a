"""Non-neural extractive baselines: LSA embedding with k-means cluster
heads, and lead-N.

The LSA space factors a TF-IDF term-sentence matrix (raw count times
smoothed idf ln((1+N)/(1+df)) + 1) with a truncated SVD; requested
dimensions are clipped to the numerical rank. A document is summarized
by embedding its sentences, running k-means with k = ceil(sqrt(n)), and
keeping each cluster's member closest to the centroid.
"""

import json
import math
from dataclasses import dataclass

import numpy as np


@dataclass
class LsaSpace:
    terms: list
    idf: np.ndarray          # per term
    projection: np.ndarray   # terms x k, orthonormal columns

    @property
    def dims(self):
        return self.projection.shape[1]

    def _tfidf(self, tokens):
        index = {t: i for i, t in enumerate(self.terms)}
        vec = np.zeros(len(self.terms))
        for tok in tokens:
            i = index.get(tok)
            if i is not None:
                vec[i] += 1.0
        return vec * self.idf

    def embed(self, tokens):
        return self.projection.T @ self._tfidf(tokens)


def fit_lsa(sentences, dims=200):
    """Fit an LSA space on tokenized sentences (list of token lists)."""
    sentences = [list(s) for s in sentences]
    if len(sentences) < 2:
        raise ValueError("fit_lsa needs at least two sentences")
    terms = sorted({tok for sent in sentences for tok in sent})
    if not terms:
        raise ValueError("fit_lsa got an empty vocabulary")
    index = {t: i for i, t in enumerate(terms)}
    n_docs = len(sentences)
    counts = np.zeros((len(terms), n_docs))
    for j, sent in enumerate(sentences):
        for tok in sent:
            counts[index[tok], j] += 1.0
    df = (counts > 0).sum(axis=1)
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    matrix = counts * idf[:, None]

    u, s, _ = np.linalg.svd(matrix, full_matrices=False)
    rank = int(np.sum(s > (s[0] * 1e-10 if s[0] > 0 else 0)))
    k = max(1, min(dims, rank))
    return LsaSpace(terms=terms, idf=idf, projection=u[:, :k].copy())


def save_space(space, path):
    obj = {
        "terms": space.terms,
        "idf": space.idf.tolist(),
        "projection": [row.tolist() for row in space.projection],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, sort_keys=True)


def load_space(path):
    with open(path, encoding="utf-8") as f:
        obj = json.load(f)
    return LsaSpace(terms=list(obj["terms"]), idf=np.array(obj["idf"]),
                    projection=np.array(obj["projection"]))


# ---------------------------------------------------------------------------
# k-means with cluster heads
# ---------------------------------------------------------------------------

@dataclass
class Clustering:
    centroids: np.ndarray
    assignment: np.ndarray
    heads: list
    objective_trace: list


def _plus_plus_seeds(points, k, rng):
    n = points.shape[0]
    centers = [int(rng.integers(n))]
    for _ in range(k - 1):
        d2 = np.min(
            [((points - points[c]) ** 2).sum(axis=1) for c in centers], axis=0)
        total = d2.sum()
        if total == 0:
            # all points coincide with chosen centers; spread deterministically
            remaining = [i for i in range(n) if i not in centers]
            centers.append(remaining[0] if remaining else centers[0])
            continue
        r = rng.random() * total
        centers.append(int(np.searchsorted(np.cumsum(d2), r)))
    return points[centers].copy()


def kmeans_cluster(points, k, seed=0, max_iter=100):
    """Lloyd's iterations from k-means++ seeds; empty clusters are
    dropped. The within-cluster squared-distance trace is recorded after
    every assignment step (monotone nonincreasing)."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    k = min(k, n)
    rng = np.random.default_rng(seed)
    centroids = _plus_plus_seeds(points, k, rng)

    trace = []
    assignment = None
    for _ in range(max_iter):
        d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assignment = d2.argmin(axis=1)
        trace.append(float(d2[np.arange(n), new_assignment].sum()))
        if assignment is not None and np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
        keep = [c for c in range(centroids.shape[0])
                if np.any(assignment == c)]
        centroids = np.stack([points[assignment == c].mean(axis=0) for c in keep])
        # renumber after dropping empties
        remap = {c: i for i, c in enumerate(keep)}
        assignment = np.array([remap[c] for c in assignment])

    heads = []
    for c in range(centroids.shape[0]):
        members = np.flatnonzero(assignment == c)
        dist = ((points[members] - centroids[c]) ** 2).sum(axis=1)
        heads.append(int(members[int(dist.argmin())]))  # argmin: lowest index on ties
    return Clustering(centroids=centroids, assignment=assignment,
                      heads=heads, objective_trace=trace)


def cluster_count(n):
    """ceil(sqrt(n)) clusters for an n-sentence document."""
    return max(1, math.isqrt(n - 1) + 1) if n > 1 else 1


def kmeans_extract(doc, space, seed=0):
    """LSA + k-means summary: cluster heads in document order."""
    from beginsum.selection import Summary

    n = doc.num_sentences
    points = np.stack([space.embed(toks) for toks in doc.tokens])
    clustering = kmeans_cluster(points, cluster_count(n), seed=seed)
    picked = sorted(set(clustering.heads))
    return Summary(indices=picked, texts=[doc.texts[i] for i in picked])


def lead_summary(doc, n=3):
    """lead-N baseline: the first N sentences."""
    from beginsum.selection import Summary

    picked = list(range(min(n, doc.num_sentences)))
    return Summary(indices=picked, texts=[doc.texts[i] for i in picked])
