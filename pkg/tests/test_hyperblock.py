import numpy as np
import pytest

from conftest import make_dataset
from hyperblocks.hyperblock import (GeometryError, HyperBlock, HyperCube,
                                    block_from_bounds, contains, contains_batch,
                                    dominant_class, envelope,
                                    hypercube_from_seed, impurity,
                                    overlap_coords)


def box(*intervals, **kwargs):
    return HyperBlock(bounds=np.array(intervals, dtype=float), **kwargs)


def test_contains_is_closed_on_both_ends():
    hb = box((0.2, 0.6), (0.0, 1.0))
    assert contains(hb, np.array([0.2, 0.0]))
    assert contains(hb, np.array([0.6, 1.0]))
    assert contains(hb, np.array([0.4, 0.5]))
    assert not contains(hb, np.array([0.19999, 0.5]))
    assert not contains(hb, np.array([0.60001, 0.5]))


def test_contains_batch_matches_scalar():
    hb = box((0.25, 0.75), (0.25, 0.75))
    pts = np.array([[0.25, 0.75], [0.5, 0.5], [0.1, 0.5], [0.8, 0.8]])
    got = contains_batch(hb.bounds, pts)
    assert got.tolist() == [contains(hb, p) for p in pts]


def test_degenerate_interval_is_a_point():
    hb = box((0.5, 0.5))
    assert contains(hb, np.array([0.5]))
    assert not contains(hb, np.array([0.5001]))
    assert hb.volume == 0.0


def test_invalid_bounds_rejected():
    with pytest.raises(GeometryError):
        box((0.7, 0.3))


def test_center_and_volume():
    hb = box((0.0, 0.5), (0.2, 0.6))
    assert hb.center.tolist() == [0.25, 0.4]
    assert hb.volume == pytest.approx(0.5 * 0.4)


def test_block_from_bounds_collects_members():
    d = make_dataset([[0.1, 0.1], [0.5, 0.5], [0.9, 0.9], [0.5, 0.9]],
                     ["a", "a", "b", "b"])
    hb = block_from_bounds(np.array([[0.0, 0.6], [0.0, 1.0]]), d)
    assert hb.member_ids == (0, 1, 3)
    assert hb.class_counts == {"a": 2, "b": 1}


def test_envelope_minimal_bounds_and_membership():
    d = make_dataset([[0.1], [0.3], [0.5], [0.9]], ["a", "a", "a", "b"])
    a = block_from_bounds(np.array([[0.0, 0.15]]), d)
    b = block_from_bounds(np.array([[0.45, 0.55]]), d)
    e = envelope(a, b, d)
    assert e.bounds.tolist() == [[0.0, 0.55]]
    # membership recomputed from the full dataset, not the two inputs
    assert e.member_ids == (0, 1, 2)
    assert e.class_counts == {"a": 3}


def test_envelope_without_dataset_unions_counts():
    a = box((0.0, 0.2), member_ids=(0,), class_counts={"a": 1})
    b = box((0.5, 0.9), member_ids=(2,), class_counts={"b": 1})
    e = envelope(a, b)
    assert e.bounds.tolist() == [[0.0, 0.9]]
    assert e.member_ids == (0, 2)
    assert e.class_counts == {"a": 1, "b": 1}


def test_envelope_dimension_mismatch():
    with pytest.raises(GeometryError):
        envelope(box((0, 1)), box((0, 1), (0, 1)))


def test_impurity_and_dominant():
    hb = box((0, 1), class_counts={"M": 92, "B": 1})
    assert impurity(hb) == pytest.approx(1 / 93)
    assert dominant_class(hb) == "M"
    assert dominant_class(box((0, 1))) is None
    with pytest.raises(GeometryError):
        impurity(box((0, 1)))  # undefined without members


def test_dominant_tie_is_none():
    assert dominant_class(box((0, 1), class_counts={"a": 3, "b": 3})) is None


def test_overlap_coords_touching_counts_as_overlap():
    a = box((0.0, 0.5), (0.0, 0.4))
    b = box((0.5, 1.0), (0.6, 1.0))
    assert overlap_coords(a, b) == {0}


def test_overlap_coords_disjoint_everywhere():
    a = box((0.0, 0.2), (0.0, 0.2))
    b = box((0.4, 0.6), (0.5, 1.0))
    assert overlap_coords(a, b) == set()


class TestHyperCube:
    def test_bounds_clipped_to_unit_box(self):
        cube = HyperCube(center=np.array([0.1, 0.95]), side_length=0.4)
        assert np.allclose(cube.bounds(), [[0.0, 0.3], [0.75, 1.0]])

    def test_seed_collects_members(self):
        d = make_dataset([[0.5, 0.5], [0.6, 0.6], [0.9, 0.9]], ["a", "b", "a"])
        hb = hypercube_from_seed(d.values[0], 0.4, d)
        assert hb.kind == "seed"
        assert hb.member_ids == (0, 1)
        assert hb.bounds.tolist() == [[0.3, 0.7], [0.3, 0.7]]

    def test_bad_side_length(self):
        with pytest.raises(GeometryError):
            hypercube_from_seed(np.array([0.5]), 0.0)


def test_json_round_trip():
    hb = box((0.25, 0.75), (0.0, 1.0), member_ids=(3, 1),
             class_counts={"B": 2}, kind="seed")
    back = HyperBlock.from_json(hb.to_json())
    assert back.bounds.tolist() == hb.bounds.tolist()
    assert back.member_ids == tuple(sorted(hb.member_ids))
    assert back.class_counts == hb.class_counts
    assert back.kind == hb.kind
