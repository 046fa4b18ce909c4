import numpy as np
import pytest

from conftest import make_dataset
from hyperblocks.hyperblock import block_from_bounds, impurity
from hyperblocks.mhyper import (HBModel, MHyperConfig, dedup, discover,
                                merge_dominant, merge_pure, seeded_blocks)


def line(*pts):
    """1-D dataset from (value, label) pairs."""
    return make_dataset([[v] for v, _ in pts], [lab for _, lab in pts])


class TestMergePure:
    def test_blocks_are_pure_and_cover_every_point(self):
        d = line((0.0, "x"), (0.1, "x"), (0.2, "y"), (0.3, "x"))
        blocks = merge_pure(d)
        covered = set()
        for hb in blocks:
            assert impurity(hb) == 0.0
            covered.update(hb.member_ids)
        assert covered == {0, 1, 2, 3}

    def test_impure_envelope_blocks_growth(self):
        # y at 0.2 sits between the x points, so no x pair can merge past it
        d = line((0.0, "x"), (0.1, "x"), (0.2, "y"), (0.3, "x"))
        blocks = merge_pure(d)
        members = sorted(hb.member_ids for hb in blocks)
        assert members == [(0, 1), (2,), (3,)]

    def test_chain_growth_through_commits(self):
        d = line((0.0, "x"), (0.2, "x"), (0.4, "x"), (0.45, "y"))
        blocks = merge_pure(d)
        members = sorted(hb.member_ids for hb in blocks)
        assert members == [(0, 1, 2), (3,)]

    def test_membership_recomputed_from_full_dataset(self):
        d = line((0.0, "x"), (0.1, "x"), (0.05, "x"), (0.9, "y"))
        for hb in merge_pure(d):
            recomputed = block_from_bounds(hb.bounds, d)
            assert hb.member_ids == recomputed.member_ids

    def test_seed_order_changes_block_structure(self):
        # B+C envelope swallows the opposing point D, so whichever of the
        # A-B / A-C merges happens first wins the shared corner point A
        d = make_dataset([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
                         ["x", "x", "x", "y"])
        by_default = sorted(hb.member_ids for hb in merge_pure(d))
        cfg = MHyperConfig(seed_order=(2, 0, 1, 3))
        by_order = sorted(hb.member_ids for hb in merge_pure(d, cfg))
        assert by_default == [(0, 1), (2,), (3,)]
        assert by_order == [(0, 2), (1,), (3,)]

    def test_deterministic(self):
        rng = np.random.default_rng(11)
        d = make_dataset(rng.random((20, 3)),
                         [f"c{i}" for i in rng.integers(0, 2, 20)])
        a = [hb.bounds.tolist() for hb in merge_pure(d)]
        b = [hb.bounds.tolist() for hb in merge_pure(d)]
        assert a == b

    def test_bad_seed_order_rejected(self):
        d = line((0.0, "x"), (0.5, "y"))
        with pytest.raises(ValueError):
            merge_pure(d, MHyperConfig(seed_order=(0,)))


class TestMergeDominant:
    # cheapest cross-gap merge swallows the y point: 3 x + 1 y, impurity
    # exactly 0.25 (representable, so the strictness check is meaningful)
    def setup_method(self):
        self.d = line((0.0, "x"), (0.1, "x"), (0.15, "y"), (0.2, "x"))
        self.pure = merge_pure(self.d)

    def test_merges_under_threshold(self):
        model = merge_dominant(self.pure, self.d,
                               MHyperConfig(impurity_threshold=0.3))
        assert len(model.blocks) == 1
        hb = model.blocks[0]
        assert hb.member_ids == (0, 1, 2, 3)
        assert impurity(hb) == pytest.approx(0.25)
        assert model.refused == []

    def test_threshold_gate_is_strict(self):
        model = merge_dominant(self.pure, self.d,
                               MHyperConfig(impurity_threshold=0.25))
        assert sorted(hb.member_ids for hb in model.blocks) == \
            sorted(hb.member_ids for hb in self.pure)

    def test_impure_input_above_threshold_is_refused(self):
        bad = block_from_bounds(np.array([[0.0, 0.15]]), self.d)
        assert impurity(bad) == pytest.approx(1 / 3)
        model = merge_dominant(self.pure + [bad], self.d,
                               MHyperConfig(impurity_threshold=0.1))
        assert any(hb.member_ids == bad.member_ids for hb in model.refused)
        for hb in model.blocks:
            assert impurity(hb) <= 0.1

    def test_output_blocks_respect_threshold(self):
        model = merge_dominant(self.pure, self.d,
                               MHyperConfig(impurity_threshold=0.3))
        for hb in model.blocks:
            assert impurity(hb) <= 0.3


class TestDiscover:
    def test_zero_threshold_equals_pure_merge(self):
        d = line((0.0, "x"), (0.1, "x"), (0.2, "y"), (0.3, "x"))
        model = discover(d, MHyperConfig(impurity_threshold=0.0))
        assert sorted(hb.member_ids for hb in model.blocks) == \
            sorted(hb.member_ids for hb in merge_pure(d))
        assert model.refused == []

    def test_records_config_and_provenance(self):
        d = line((0.0, "x"), (0.5, "y"))
        cfg = MHyperConfig(impurity_threshold=0.1)
        model = discover(d, cfg)
        assert model.config == cfg
        assert model.provenance == d.fingerprint()

    def test_json_round_trip(self):
        d = line((0.0, "x"), (0.1, "x"), (0.2, "y"), (0.3, "x"))
        model = discover(d, MHyperConfig(impurity_threshold=0.25))
        back = HBModel.from_json(model.to_json())
        assert back.canonical() == model.canonical()
        assert back.config.impurity_threshold == 0.25


def test_dedup_removes_identical_blocks():
    d = line((0.2, "x"), (0.8, "y"))
    a = block_from_bounds(np.array([[0.0, 0.5]]), d)
    b = block_from_bounds(np.array([[0.0, 0.5]]), d)
    c = block_from_bounds(np.array([[0.0, 1.0]]), d)
    assert dedup([a, b, c]) == [a, c]


def test_seeded_blocks_dedups_coincident_points():
    d = make_dataset([[0.5], [0.5], [0.9]], ["x", "x", "y"])
    cubes = seeded_blocks(d, 0.4)
    assert len(cubes) == 2
    assert all(hb.kind == "seed" for hb in cubes)
    # the shared cube keeps both coincident points as members
    assert cubes[0].member_ids == (0, 1)


def test_seeded_blocks_count_on_wbc(wbc_norm):
    cubes = seeded_blocks(wbc_norm, 0.4)
    assert len(cubes) == 449
    mixed = [hb for hb in cubes if impurity(hb) > 0]
    assert len(mixed) == 4
