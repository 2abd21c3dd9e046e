"""Distance matrix and goeBURST tree construction.

The heavyweight checks are oracle-based: matrices against a brute-force
double loop, trees against exhaustive enumeration of all labeled spanning
trees (small n) and against scipy's MST weight (larger n).
"""

import bisect
import itertools
import random
from functools import cmp_to_key

import numpy as np
import pytest
import scipy.sparse
import scipy.sparse.csgraph

from phylograph.inference import (
    DistanceMatrix,
    LengthMismatchError,
    VertexRank,
    build_matrix,
    edge_compare,
    founder,
    goeburst,
    hamming,
    rank_vertices,
)


def matrix_of(d, ids=None, loci=7):
    """Wrap a raw square array as a DistanceMatrix for direct injection."""
    d = np.asarray(d, dtype=np.int32)
    ids = tuple(ids or [f"p{i}" for i in range(len(d))])
    return DistanceMatrix(ids, d, loci)


def random_profiles(rng, n, loci=7, alphabet=4, missing_rate=0.1):
    out = []
    for i in range(n):
        alleles = tuple(
            None if rng.random() < missing_rate else str(rng.randrange(alphabet))
            for _ in range(loci))
        out.append((f"p{i:03d}", alleles))
    return out


class TestHamming:
    def test_identical_profiles_are_at_distance_zero(self):
        assert hamming(["1"] * 7, ["1"] * 7) == 0

    def test_single_differing_slot(self):
        assert hamming(["1", "2", "3"], ["1", "5", "3"]) == 1

    def test_missing_differs_even_from_missing(self):
        assert hamming(["1", None, "3"], ["1", None, "3"]) == 1
        assert hamming([None], [None]) == 1
        assert hamming(["1", None], ["1", "2"]) == 1

    def test_length_mismatch_refused(self):
        with pytest.raises(LengthMismatchError):
            hamming(["1"], ["1", "2"])


class TestBuildMatrix:
    def test_single_profile_yields_zero_matrix(self):
        m = build_matrix([("a", ("1", "2", "3"))])
        assert m.ids == ("a",)
        assert m.distances.shape == (1, 1)
        assert m.distance(0, 0) == 0

    def test_duplicate_content_is_distance_zero(self):
        m = build_matrix([("a", ("1", "2")), ("b", ("1", "2"))])
        assert m.distance(0, 1) == 0

    def test_matches_double_loop_oracle(self):
        rng = random.Random(11)
        for _ in range(20):
            profiles = random_profiles(rng, 10)
            m = build_matrix(profiles)
            for i in range(10):
                for j in range(10):
                    expected = 0 if i == j else hamming(profiles[i][1],
                                                        profiles[j][1])
                    assert m.distance(i, j) == expected

    def test_matrix_invariants(self):
        rng = random.Random(12)
        profiles = random_profiles(rng, 30)
        m = build_matrix(profiles)
        d = m.distances
        assert (d == d.T).all()
        assert (np.diag(d) == 0).all()
        assert (d >= 0).all() and (d <= m.loci).all()

    def test_duplicate_ids_refused(self):
        with pytest.raises(ValueError):
            build_matrix([("a", ("1",)), ("a", ("2",))])

    def test_ragged_input_refused(self):
        with pytest.raises(LengthMismatchError):
            build_matrix([("a", ("1", "2")), ("b", ("1",))])


class TestVertexRanks:
    def test_pair_at_distance_one(self):
        m = matrix_of([[0, 1], [1, 0]])
        ranks = rank_vertices(m, 1)
        assert [r.counts for r in ranks] == [(1,), (1,)]

    def test_star_hub_counts_its_spokes(self):
        def spoke(i):
            alleles = ["1"] * 7
            alleles[i] = "9"
            return (f"s{i}", tuple(alleles))

        m = build_matrix([("hub", ("1",) * 7)] + [spoke(i) for i in range(4)])
        ranks = {r.id: r for r in rank_vertices(m, 3)}
        assert ranks["hub"].counts[0] == 4
        # spokes see the hub at 1 and each other at 2
        assert ranks["s0"].counts == (1, 3, 0)

    def test_counts_match_recount_oracle(self):
        rng = random.Random(13)
        for _ in range(15):
            profiles = random_profiles(rng, 8)
            m = build_matrix(profiles)
            freqs = {pid: rng.randrange(5) for pid, _ in profiles}
            for i, rank in enumerate(rank_vertices(m, 3, freqs)):
                for k in (1, 2, 3):
                    expected = sum(1 for j in range(8)
                                   if j != i and m.distance(i, j) == k)
                    assert rank.counts[k - 1] == expected
                assert rank.frequency == freqs[rank.id]


def const_ranks(ids, counts=(0, 0, 0), frequency=0, overrides=None):
    overrides = overrides or {}
    return {pid: VertexRank(pid, *overrides.get(pid, (counts, frequency)))
            for pid in ids}


class TestEdgeCompare:
    def test_weight_dominates(self):
        ranks = const_ranks("ABC")
        assert edge_compare(("A", "B", 1), ("A", "C", 2), ranks) == -1
        assert edge_compare(("A", "C", 2), ("A", "B", 1), ranks) == 1

    def test_higher_slv_count_wins_ties(self):
        ranks = const_ranks("ABC", overrides={"B": ((3, 0, 0), 0),
                                              "C": ((2, 0, 0), 0)})
        assert edge_compare(("A", "B", 1), ("A", "C", 1), ranks) == -1

    def test_id_pair_breaks_total_ties(self):
        ranks = const_ranks("ABC")
        assert edge_compare(("A", "B", 1), ("A", "C", 1), ranks) == -1
        assert edge_compare(("B", "A", 1), ("C", "A", 1), ranks) == -1

    def test_frequency_considered_before_ids(self):
        ranks = const_ranks("ABCD", overrides={"D": ((0, 0, 0), 9)})
        # (C,D) carries the high-frequency endpoint, so it beats (A,B)
        assert edge_compare(("C", "D", 1), ("A", "B", 1), ranks) == -1

    def test_edge_is_equal_to_itself(self):
        ranks = const_ranks("AB")
        assert edge_compare(("A", "B", 1), ("A", "B", 1), ranks) == 0
        assert edge_compare(("A", "B", 1), ("B", "A", 1), ranks) == 0

    def test_totality_over_random_triples(self):
        """Antisymmetry and transitivity on ≥10⁴ random triples."""
        rng = random.Random(99)
        ids = [f"v{i}" for i in range(12)]
        ranks = {pid: VertexRank(pid,
                                 tuple(rng.randrange(4) for _ in range(3)),
                                 rng.randrange(4))
                 for pid in ids}

        def random_edge():
            a, b = rng.sample(ids, 2)
            return (a, b, rng.randrange(3))

        for _ in range(11000):
            e1, e2, e3 = random_edge(), random_edge(), random_edge()
            c12 = edge_compare(e1, e2, ranks)
            c21 = edge_compare(e2, e1, ranks)
            assert c12 == -c21
            c23 = edge_compare(e2, e3, ranks)
            c13 = edge_compare(e1, e3, ranks)
            if c12 <= 0 and c23 <= 0:
                assert c13 <= 0
            if c12 >= 0 and c23 >= 0:
                assert c13 >= 0


# -- exhaustive spanning-tree oracle ---------------------------------------

def all_spanning_trees(n):
    """Every labeled spanning tree on n vertices, via Prüfer sequences."""
    if n == 1:
        yield []
        return
    if n == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        yield _tree_from_pruefer(list(seq), n)


def _tree_from_pruefer(seq, n):
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    leaves = sorted(v for v in range(n) if degree[v] == 1)
    for v in seq:
        leaf = leaves.pop(0)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[v] -= 1
        if degree[v] == 1:
            bisect.insort(leaves, v)
    u, w = leaves
    edges.append((u, w))
    return edges


def best_tree_by_enumeration(matrix, lvs, freqs):
    """Minimum spanning tree under the edge order, chosen by comparing the
    sorted edge-key sequences of *all* spanning trees."""
    ranks = {r.id: r for r in rank_vertices(matrix, lvs, freqs)}
    compare = cmp_to_key(lambda x, y: edge_compare(x, y, ranks, lvs))
    n = len(matrix)

    def tree_key(tree):
        keyed = sorted(
            ((min(matrix.ids[i], matrix.ids[j]),
              max(matrix.ids[i], matrix.ids[j]),
              matrix.distance(i, j)) for i, j in tree),
            key=compare)
        return [compare(e) for e in keyed]

    best = min(all_spanning_trees(n), key=tree_key)
    return sorted((min(matrix.ids[i], matrix.ids[j]),
                   max(matrix.ids[i], matrix.ids[j]),
                   matrix.distance(i, j)) for i, j in best)


class TestGoeBurst:
    def test_single_profile_has_no_edges(self):
        m = build_matrix([("a", ("1", "2", "3", "4", "5", "6", "7"))])
        assert goeburst(m) == []

    def test_three_node_tie_resolved_toward_smaller_ids(self):
        # d(A,B)=1, d(A,C)=1, d(B,C)=2; flat ranks → tree {AB, AC}
        m = matrix_of([[0, 1, 1], [1, 0, 2], [1, 2, 0]], ids=("A", "B", "C"))
        assert goeburst(m) == [("A", "B", 1), ("A", "C", 1)]

    def test_matches_exhaustive_oracle_on_small_instances(self):
        rng = random.Random(5)
        for _ in range(25):
            n = rng.randint(2, 6)
            profiles = random_profiles(rng, n, loci=4, alphabet=3,
                                       missing_rate=0.15)
            m = build_matrix(profiles)
            freqs = {pid: rng.randrange(4) for pid, _ in profiles}
            got = sorted(goeburst(m, 3, freqs))
            want = best_tree_by_enumeration(m, 3, freqs)
            assert got == want

    def test_matches_reference_kruskal_over_edge_compare(self):
        """Dual route: the vectorized sort must order edges exactly as the
        plain-Python comparator does."""
        rng = random.Random(6)
        for _ in range(10):
            profiles = random_profiles(rng, 30, loci=7)
            m = build_matrix(profiles)
            freqs = {pid: rng.randrange(6) for pid, _ in profiles}
            assert goeburst(m, 3, freqs) == _reference_goeburst(m, 3, freqs)

    def test_total_weight_matches_scipy_mst(self):
        rng = random.Random(7)
        for _ in range(5):
            profiles = random_profiles(rng, 40)
            m = build_matrix(profiles)
            got = sum(d for _, _, d in goeburst(m))
            # scipy drops explicit zeros, so shift all weights up by one
            shifted = scipy.sparse.csr_matrix(m.distances + 1
                                              - np.eye(len(m), dtype=np.int32))
            mst = scipy.sparse.csgraph.minimum_spanning_tree(shifted)
            want = int(mst.sum()) - (len(m) - 1)
            assert got == want

    def test_deterministic_across_runs(self):
        rng = random.Random(8)
        profiles = random_profiles(rng, 50)
        freqs = {pid: rng.randrange(5) for pid, _ in profiles}
        first = goeburst(build_matrix(profiles), 3, freqs)
        second = goeburst(build_matrix(list(profiles)), 3, dict(freqs))
        assert first == second

    def test_frequency_scaling_leaves_tree_unchanged(self):
        rng = random.Random(9)
        profiles = random_profiles(rng, 25)
        freqs = {pid: rng.randrange(1, 6) for pid, _ in profiles}
        m = build_matrix(profiles)
        base = goeburst(m, 3, freqs)
        for factor in (2, 7, 1000):
            scaled = {pid: f * factor for pid, f in freqs.items()}
            assert goeburst(m, 3, scaled) == base

    def test_lvs_bounds_enforced(self):
        m = build_matrix([("a", ("1", "2")), ("b", ("2", "2"))])
        with pytest.raises(ValueError):
            goeburst(m, 0)
        with pytest.raises(ValueError):
            goeburst(m, 3)  # only two loci
        assert len(goeburst(m, 2)) == 1

    def test_edge_count_spans_the_profiles(self):
        rng = random.Random(10)
        profiles = random_profiles(rng, 33)
        edges = goeburst(build_matrix(profiles))
        assert len(edges) == 32
        touched = {p for a, b, _ in edges for p in (a, b)}
        assert touched == {pid for pid, _ in profiles}


def _reference_goeburst(matrix, lvs, freqs):
    ranks = {r.id: r for r in rank_vertices(matrix, lvs, freqs)}
    n = len(matrix)
    pairs = [(matrix.ids[i], matrix.ids[j], matrix.distance(i, j))
             for i in range(n) for j in range(i + 1, n)]
    pairs.sort(key=cmp_to_key(lambda a, b: edge_compare(a, b, ranks, lvs)))
    parent = {pid: pid for pid in matrix.ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for a, b, d in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            lo, hi = sorted((a, b))
            edges.append((lo, hi, d))
    return edges


class TestFounder:
    def test_prefers_counts_then_frequency_then_smallest_id(self):
        ranks = [VertexRank("b", (2, 1), 0),
                 VertexRank("a", (2, 1), 0),
                 VertexRank("c", (1, 9), 9)]
        assert founder(ranks) == "a"
        ranks.append(VertexRank("z", (3, 0), 0))
        assert founder(ranks) == "z"


class TestResultStorage:
    """Edge layers persisted per inference id, isolated from one another."""

    @pytest.fixture()
    def world(self, tmp_path):
        from phylograph.domain import (AllelicProfile, Dataset, DatasetRepository,
                                       Project, ProjectRepository,
                                       ProfileRepository, Schema,
                                       SchemaRepository)
        from phylograph.graphstore import GraphStore
        from phylograph.inference import InferenceResultRepository

        store = GraphStore(tmp_path / "store", fsync=False)
        projects = ProjectRepository(store)
        schemas = SchemaRepository(store)
        datasets = DatasetRepository(store)
        profiles = ProfileRepository(store)
        results = InferenceResultRepository(store)
        with store.begin(mode="write") as tx:
            projects.save(tx, Project(id="p"))
            schemas.save(tx, Schema(id="s", taxon="t", loci=("l1", "l2")))
            datasets.save(tx, Dataset(id="d", project="p", schema="s"))
            for pid, alleles in (("a", ("1", "1")), ("b", ("1", "2")),
                                 ("c", ("2", "2"))):
                profiles.save(tx, "p", "d", AllelicProfile(id=pid,
                                                           alleles=alleles))
            tx.commit()
        yield store, results
        store.close()

    def test_round_trip_and_isolation(self, world):
        store, results = world
        with store.begin(mode="write") as tx:
            results.persist(tx, "p", "d", "inf1",
                            [("a", "b", 1), ("b", "c", 1)],
                            algorithm="algorithms.inference.goeburst",
                            parameters={"lvs": 3}, founder="b")
            results.persist(tx, "p", "d", "inf2", [("a", "c", 2)])
            tx.commit()
        with store.begin() as tx:
            assert results.edges(tx, "p", "d", "inf1") == [("a", "b", 1),
                                                           ("b", "c", 1)]
            assert results.edges(tx, "p", "d", "inf2") == [("a", "c", 2)]
            assert results.edges(tx, "p", "d", "nope") == []
            got = results.fetch(tx, "p", "d", "inf1")
            assert got.founder == "b"
            assert got.parameters == {"lvs": 3}
            assert got.profiles == ("a", "b", "c")
            assert sorted(results.list_ids(tx, "p", "d")) == ["inf1", "inf2"]

    def test_overwrite_replaces_previous_layer(self, world):
        store, results = world
        with store.begin(mode="write") as tx:
            results.persist(tx, "p", "d", "inf1",
                            [("a", "b", 1), ("b", "c", 1)])
            tx.commit()
        with store.begin(mode="write") as tx:
            results.persist(tx, "p", "d", "inf1", [("a", "c", 2)])
            tx.commit()
        with store.begin() as tx:
            assert results.edges(tx, "p", "d", "inf1") == [("a", "c", 2)]

    def test_unknown_endpoint_refused(self, world):
        from phylograph.domain import UnknownProfileError
        store, results = world
        with store.begin(mode="write") as tx:
            with pytest.raises(UnknownProfileError):
                results.persist(tx, "p", "d", "inf1", [("a", "ghost", 1)])

    def test_self_loop_refused(self, world):
        store, results = world
        with store.begin(mode="write") as tx:
            with pytest.raises(ValueError):
                results.persist(tx, "p", "d", "inf1", [("a", "a", 0)])
