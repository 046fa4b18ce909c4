"""Randomized suites over small generated datasets; no bundled data needed."""
import numpy as np
import pytest

from conftest import make_dataset, random_dataset
from hyperblocks.analytics import (ConfusionMatrix, evaluate_rule,
                                   quantile_histogram, simple_rule_search)
from hyperblocks.dataset import Dataset
from hyperblocks.dtree import (branch_to_hb, hb_contains_open, hb_to_branch,
                               id3_train, tree_to_hbs)
from hyperblocks.hyperblock import (block_from_bounds, contains_batch, envelope,
                                    impurity)
from hyperblocks.mhyper import MHyperConfig, discover, merge_pure

INSTANCES = 200


def instances(seed):
    rng = np.random.default_rng(seed)
    for _ in range(INSTANCES):
        yield rng


def consistent_labels(values):
    # coincident points must share a label or no pure cover can exist
    return [f"c{int(round(v.sum() * 3)) % 2}" for v in values]


def test_purity_preservation():
    for rng in instances(101):
        base = random_dataset(rng, grid=int(rng.integers(2, 6)))
        d = make_dataset(base.values, consistent_labels(base.values))
        for hb in merge_pure(d):
            assert hb.member_count > 0
            assert impurity(hb) == 0.0


def test_coverage():
    for rng in instances(102):
        d = random_dataset(rng, grid=int(rng.integers(2, 6)))
        covered = set()
        for hb in merge_pure(d):
            covered.update(hb.member_ids)
        assert covered == set(range(d.size))


def test_envelope_minimality_and_monotonicity():
    for rng in instances(103):
        d = random_dataset(rng)
        dims = d.dimension
        pair = []
        for _ in range(2):
            edges = np.sort(rng.random((dims, 2)), axis=1)
            pair.append(block_from_bounds(edges, d))
        a, b = pair
        e = envelope(a, b, d)
        # minimality: the envelope is the coordinate-wise hull, nothing more
        assert np.array_equal(e.bounds[:, 0],
                              np.minimum(a.bounds[:, 0], b.bounds[:, 0]))
        assert np.array_equal(e.bounds[:, 1],
                              np.maximum(a.bounds[:, 1], b.bounds[:, 1]))
        # monotonicity: envelope membership includes both inputs' members
        assert set(e.member_ids) >= set(a.member_ids) | set(b.member_ids)
        # consistency: members are exactly the points inside the hull
        inside = contains_batch(e.bounds, d.values)
        assert set(e.member_ids) == {int(i) for i in np.flatnonzero(inside)}


def test_determinism_under_fixed_order():
    for rng in instances(104):
        d = random_dataset(rng, grid=4)
        order = tuple(int(i) for i in rng.permutation(d.size))
        cfg = MHyperConfig(impurity_threshold=float(rng.choice([0.0, 0.2])),
                           seed_order=order)
        first = discover(d, cfg)
        second = discover(d, cfg)
        assert first.canonical() == second.canonical()


def test_dt_hb_round_trip_identity():
    domain = (0.0, 10.0)
    for rng in instances(105):
        dims = int(rng.integers(1, 5))
        branch = []
        for coord in range(dims):
            if rng.random() < 0.3:
                continue
            lo, hi = np.sort(rng.uniform(0.5, 9.5, size=2))
            if rng.random() < 0.5:
                branch.append((coord, ">" if rng.random() < 0.5 else ">=",
                               float(round(lo, 3))))
            if rng.random() < 0.5:
                branch.append((coord, "<" if rng.random() < 0.5 else "<=",
                               float(round(hi, 3))))
        if not branch:
            continue
        hb = branch_to_hb(branch, domain)
        back = branch_to_hb(hb_to_branch(hb, domain), domain, n_dims=hb.dimension)
        assert np.array_equal(hb.bounds, back.bounds)
        assert np.array_equal(hb.lo_open, back.lo_open)
        assert np.array_equal(hb.hi_open, back.hi_open)


def test_converted_hbs_classify_like_the_tree():
    for rng in instances(106):
        d = random_dataset(rng, grid=int(rng.integers(2, 8)))
        tree = id3_train(d)
        hbs = tree_to_hbs(tree, (0.0, 1.0))
        for x in d.values:
            hits = [hb for hb in hbs if hb_contains_open(hb, x)]
            assert len(hits) == 1
            decided = max(hits[0].class_counts, key=hits[0].class_counts.get)
            assert decided == tree.predict(x)


def test_confusion_matrix_totals():
    for rng in instances(107):
        labels = tuple(f"c{i}" for i in range(int(rng.integers(2, 5))))
        cm = ConfusionMatrix(labels=labels)
        n = int(rng.integers(1, 31))
        correct = decided = 0
        for _ in range(n):
            actual = labels[int(rng.integers(len(labels)))]
            if rng.random() < 0.2:
                cm.add(actual, None)
                continue
            predicted = labels[int(rng.integers(len(labels)))]
            cm.add(actual, predicted)
            decided += 1
            correct += actual == predicted
        assert cm.total == n
        assert int(cm.counts.sum()) == decided
        assert sum(cm.refused.values()) == n - decided
        if decided:
            assert cm.accuracy == pytest.approx(correct / decided)


def test_1d_rule_search_matches_oracle():
    for rng in instances(108):
        nd = random_dataset(rng, grid=int(rng.integers(2, 8)))
        if len(set(nd.labels)) < 2:
            continue
        d = Dataset(coordinate_names=nd.coordinate_names, ids=nd.ids,
                    values=nd.values, labels=nd.labels,
                    class_labels=nd.class_labels)
        best = simple_rule_search(d, max_dims=1)[-1]
        got = evaluate_rule(best, d).correct

        labels = np.asarray(d.labels)
        label_set = sorted(set(d.labels))
        want = 0
        for coord in range(d.dimension):
            col = d.values[:, coord]
            distinct = np.unique(col)
            mids = (distinct[:-1] + distinct[1:]) / 2
            for t in list(distinct) + list(mids) + [distinct[-1] + 1]:
                hold = col < t
                for then in label_set:
                    for other in label_set:
                        if then == other:
                            continue
                        pred = np.where(hold, then, other)
                        want = max(want, int((pred == labels).sum()))
        assert got == want


def test_quantile_bin_balance():
    for rng in instances(109):
        n = int(rng.integers(2, 31))
        q = int(rng.integers(1, 9))
        distinct = rng.random() < 0.5
        if distinct:
            values = rng.choice(np.linspace(0.0, 1.0, 60), size=n,
                                replace=False)
        else:
            values = rng.choice(np.linspace(0.0, 1.0, 5), size=n)
        d = make_dataset(values.reshape(-1, 1), ["a"] * n)
        hb = block_from_bounds(np.array([[0.0, 1.0]]), d)
        rep = quantile_histogram(hb, d, 0, q)
        assert sum(rep.counts) == n
        assert list(rep.edges) == sorted(rep.edges)
        assert len(rep.edges) == len(rep.counts) + 1
        if distinct and q <= n:
            assert max(rep.counts) - min(rep.counts) <= 1
