import hashlib
import math
import random

import pytest

from baitwatch.clustering import (
    NEW_CLUSTER,
    NOISE,
    NOISE_LABEL,
    Anchor,
    Embedding,
    cluster_pipeline,
    dbscan,
    label_clusters,
    load_anchors,
    load_embeddings,
    refine,
    write_anchors,
    write_embeddings,
)

DIM = 32


def sha_of(tag) -> str:
    return hashlib.sha256(str(tag).encode()).hexdigest()


def unit(vector):
    norm = math.sqrt(sum(x * x for x in vector))
    return tuple(x / norm for x in vector)


def point(tag, center, spread, rng):
    vec = [c + rng.uniform(-spread, spread) for c in center]
    return Embedding(sha_of(tag), unit(vec))


def centers(k, rng):
    """k well-separated unit-norm centers in 32-d."""
    out = []
    for i in range(k):
        vec = [0.0] * DIM
        vec[i * 3] = 1.0
        vec[i * 3 + 1] = 0.5
        out.append(unit(vec))
    return out


def brute_force_dbscan(points, eps, min_pts):
    """Independent O(n^2) reference: direct definition, sha-ordered seeds."""
    pts = sorted(points, key=lambda p: p.sha256)
    n = len(pts)

    def dist(i, j):
        return math.sqrt(sum((a - b) ** 2
                             for a, b in zip(pts[i].vector, pts[j].vector)))

    neighbors = [[j for j in range(n) if dist(i, j) <= eps] for i in range(n)]
    labels = {}
    cid = 0
    for i in range(n):
        if pts[i].sha256 in labels:
            continue
        if len(neighbors[i]) < min_pts:
            labels[pts[i].sha256] = NOISE
            continue
        labels[pts[i].sha256] = cid
        frontier = [j for j in neighbors[i] if j != i]
        while frontier:
            j = frontier.pop(0)
            sha = pts[j].sha256
            if labels.get(sha) == NOISE:
                labels[sha] = cid
            if sha in labels:
                continue
            labels[sha] = cid
            if len(neighbors[j]) >= min_pts:
                frontier.extend(neighbors[j])
        cid += 1
    return labels


def as_partition(labels):
    clusters = {}
    noise = set()
    for sha, cid in labels.items():
        if cid == NOISE:
            noise.add(sha)
        else:
            clusters.setdefault(cid, set()).add(sha)
    return frozenset(frozenset(c) for c in clusters.values()), frozenset(noise)


class TestDbscan:
    def test_two_separated_blobs(self):
        rng = random.Random(1)
        c1, c2 = centers(2, rng)
        pts = [point(f"a{i}", c1, 0.02, rng) for i in range(20)]
        pts += [point(f"b{i}", c2, 0.02, rng) for i in range(20)]
        labels = dbscan(pts, eps=0.2, min_pts=4)
        assert len({cid for cid in labels.values() if cid != NOISE}) == 2

    def test_identical_points_single_cluster(self):
        vec = unit([1.0] + [0.0] * (DIM - 1))
        pts = [Embedding(sha_of(i), vec) for i in range(10)]
        labels = dbscan(pts, eps=0.25, min_pts=4)
        assert set(labels.values()) == {0}

    def test_sparse_points_are_noise(self):
        rng = random.Random(2)
        pts = [point(i, centers(5, rng)[i % 5], 0.001, rng) for i in range(3)]
        labels = dbscan(pts, eps=0.01, min_pts=4)
        assert set(labels.values()) == {NOISE}

    def test_200_random_points_match_oracle(self):
        rng = random.Random(3)
        pts = [Embedding(sha_of(i), unit([rng.gauss(0, 1) for _ in range(DIM)]))
               for i in range(200)]
        mine = dbscan(pts, eps=0.25, min_pts=4)
        oracle = brute_force_dbscan(pts, eps=0.25, min_pts=4)
        assert as_partition(mine) == as_partition(oracle)

    def test_input_order_irrelevant(self):
        rng = random.Random(4)
        c1, c2 = centers(2, rng)
        pts = [point(f"a{i}", c1, 0.05, rng) for i in range(15)]
        pts += [point(f"b{i}", c2, 0.05, rng) for i in range(15)]
        forward = dbscan(pts, eps=0.2, min_pts=4)
        backward = dbscan(list(reversed(pts)), eps=0.2, min_pts=4)
        assert forward == backward


class TestLabelClusters:
    def _anchored(self, label, cluster_points):
        return [Anchor(p, label) for p in cluster_points]

    def test_unanimous_label(self):
        ids = {sha_of(i): 0 for i in range(10)}
        anchors = [Anchor(Embedding(sha_of(0), unit([1] * DIM)), "CampA")]
        assignments, conflicts = label_clusters(ids, anchors)
        assert not conflicts
        assert all(a.label == "CampA" for a in assignments)

    def test_mixed_labels_conflict(self):
        ids = {sha_of(i): 0 for i in range(10)}
        anchors = [Anchor(Embedding(sha_of(0), unit([1] * DIM)), "CampA"),
                   Anchor(Embedding(sha_of(1), unit([1] * DIM)), "CampB")]
        assignments, conflicts = label_clusters(ids, anchors)
        assert conflicts == {0: {"CampA", "CampB"}}
        assert assignments == []  # withheld pending refinement

    def test_anchor_free_cluster_is_new(self):
        ids = {sha_of(i): 0 for i in range(5)}
        assignments, conflicts = label_clusters(ids, [])
        assert not conflicts
        assert all(a.label == NEW_CLUSTER for a in assignments)

    def test_noise_labeled_noise(self):
        ids = {sha_of(0): NOISE, sha_of(1): 0}
        assignments, _ = label_clusters(ids, [])
        by_sha = {a.sha256: a for a in assignments}
        assert by_sha[sha_of(0)].label == NOISE_LABEL


class TestRefine:
    def test_chain_fixture_resolves_without_mixing(self):
        """Two anchor groups bridged by chain points merge at eps0; refinement
        must find an eps with zero mixed sub-clusters."""
        rng = random.Random(5)
        base = [0.0] * DIM
        groupA, groupB, chain = [], [], []
        for i in range(8):
            vec = list(base)
            vec[0] = 1.0 + rng.uniform(-0.01, 0.01)
            vec[1] = rng.uniform(-0.01, 0.01)
            groupA.append(Embedding(sha_of(f"A{i}"), unit(vec)))
        for i in range(8):
            vec = list(base)
            vec[0] = 1.0 + rng.uniform(-0.01, 0.01)
            vec[1] = 0.3 + rng.uniform(-0.01, 0.01)
            groupB.append(Embedding(sha_of(f"B{i}"), unit(vec)))
        for i, t in enumerate((0.08, 0.15, 0.22)):
            vec = list(base)
            vec[0] = 1.0
            vec[1] = t
            chain.append(Embedding(sha_of(f"C{i}"), unit(vec)))
        members = groupA + groupB + chain
        anchors = [Anchor(p, "A") for p in groupA[:4]] + \
                  [Anchor(p, "B") for p in groupB[:4]]
        merged = dbscan(members, 0.25, 4)
        assert len({c for c in merged.values() if c != NOISE}) == 1  # truly merged
        resolved, iterations = refine(members, anchors, 0.25, 0.01, 4)
        assert iterations <= 25
        # oracle: no sub-cluster carries both anchor labels
        anchor_label = {a.embedding.sha256: a.label for a in anchors}
        per_cluster = {}
        for item in resolved:
            if item.sha256 in anchor_label and item.cluster_id != NOISE:
                per_cluster.setdefault(item.cluster_id, set()).add(
                    anchor_label[item.sha256])
        assert per_cluster
        assert all(len(labels) == 1 for labels in per_cluster.values())

    def test_pure_cluster_unchanged_at_eps0(self):
        rng = random.Random(6)
        center = centers(1, rng)[0]
        members = [point(f"p{i}", center, 0.01, rng) for i in range(12)]
        anchors = [Anchor(members[0], "OnlyCamp")]
        resolved, iterations = refine(members, anchors, 0.25, 0.01, 4)
        assert iterations == 1
        assert {a.label for a in resolved} == {"OnlyCamp"}
        assert len({a.cluster_id for a in resolved}) == 1

    def test_coincident_anchors_floor_rule(self):
        vec = unit([1.0] + [0.0] * (DIM - 1))
        members = [Embedding(sha_of(i), vec) for i in range(10)]
        anchors = [Anchor(members[0], "First"), Anchor(members[1], "Second")]
        resolved, iterations = refine(members, anchors, 0.25, 0.01, 4)
        assert iterations <= 25
        # everyone is equidistant (zero) from both anchors: the anchor with
        # the smaller sha256 wins the tie
        winner = min(anchors, key=lambda a: a.embedding.sha256).label
        assert {a.label for a in resolved} == {winner}


class TestPipeline:
    def _fixture(self, n_groups=3, per_group=40, anchors_per_group=5, seed=7):
        rng = random.Random(seed)
        cs = centers(n_groups, rng)
        points, anchors = [], []
        for g in range(n_groups):
            for i in range(per_group):
                p = point(f"g{g}i{i}", cs[g], 0.02, rng)
                points.append(p)
                if i < anchors_per_group:
                    anchors.append(Anchor(p, f"Camp{g}"))
        return points, anchors

    def test_deterministic_and_order_invariant(self):
        points, anchors = self._fixture()
        first, _ = cluster_pipeline(points, anchors)
        rng = random.Random(8)
        shuffled = list(points)
        rng.shuffle(shuffled)
        second, _ = cluster_pipeline(shuffled, anchors)
        assert first == second

    def test_anchor_purity_invariant(self):
        points, anchors = self._fixture(n_groups=4)
        assignments, _ = cluster_pipeline(points, anchors)
        anchor_label = {a.embedding.sha256: a.label for a in anchors}
        per_cluster = {}
        for a in assignments:
            if a.sha256 in anchor_label and a.cluster_id != NOISE:
                per_cluster.setdefault(a.cluster_id, set()).add(
                    anchor_label[a.sha256])
        assert all(len(labels) == 1 for labels in per_cluster.values())

    def test_anchor_not_in_points_rejected(self):
        points, anchors = self._fixture()
        rogue = Anchor(Embedding(sha_of("rogue"), unit([1] * DIM)), "X")
        with pytest.raises(ValueError):
            cluster_pipeline(points, anchors + [rogue])


class TestExchangeFiles:
    def test_embeddings_round_trip(self, tmp_path):
        rng = random.Random(9)
        embs = [Embedding(sha_of(i), unit([rng.gauss(0, 1) for _ in range(DIM)]))
                for i in range(25)]
        path = tmp_path / "embeddings.tsv"
        write_embeddings(path, embs)
        loaded = load_embeddings(path)
        assert [e.sha256 for e in loaded] == [e.sha256 for e in embs]
        for got, want in zip(loaded, embs):
            for a, b in zip(got.vector, want.vector):
                assert abs(a - b) < 1e-9  # >= 9 significant digits round-trip

    def test_anchors_round_trip(self, tmp_path):
        rng = random.Random(10)
        anchors = [Anchor(Embedding(sha_of(i),
                                    unit([rng.gauss(0, 1) for _ in range(DIM)])),
                          f"Camp{i % 3}") for i in range(9)]
        path = tmp_path / "anchors.tsv"
        write_anchors(path, anchors)
        loaded = load_anchors(path)
        assert [a.label for a in loaded] == [a.label for a in anchors]

    def test_norm_validated_on_load(self, tmp_path):
        path = tmp_path / "embeddings.tsv"
        row = "\t".join(["ff" * 32] + ["0.5"] * DIM)
        path.write_text(row + "\n")
        with pytest.raises(ValueError):
            load_embeddings(path)

    def test_dimension_validated(self):
        with pytest.raises(ValueError):
            Embedding("aa" * 32, (0.1,) * 31)
