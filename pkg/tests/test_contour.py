import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import boundary_set, disk_offsets, is_8_adjacent, minkowski_brute, random_blob, shoelace_signed
from ringtraj.contour import (
    Contour,
    StructuringElement,
    dilate,
    find_contours,
    largest_contour,
    orient_ccw,
    rotate_to_nearest,
    write_pgm,
)
from ringtraj.errors import EmptySliceError


def test_dilate_single_pixel_disk_and_box():
    img = np.zeros((5, 5), dtype=bool)
    img[2, 2] = True
    plus = dilate(img, StructuringElement(1, "disk"))
    assert plus.sum() == 5
    assert np.array_equal(plus, minkowski_brute(img, disk_offsets(1)))
    block = dilate(img, StructuringElement(1, "box"))
    assert block.sum() == 9 and block[1:4, 1:4].all()


def test_dilate_empty_and_full():
    se = StructuringElement(2)
    assert not dilate(np.zeros((4, 7), bool), se).any()
    assert dilate(np.ones((4, 7), bool), se).all()


def test_kernel_for_standoff():
    se = StructuringElement.for_standoff(4.0, 0.5)
    assert se.radius == 8
    assert se.diameter(0.5) >= 4.0
    assert StructuringElement.for_standoff(4.0, 0.5, radius_cells=4).radius == 4


@settings(max_examples=60, deadline=None)
@given(
    arrays(bool, st.tuples(st.integers(1, 24), st.integers(1, 24))),
    st.integers(1, 4),
    st.sampled_from(["disk", "box"]),
)
def test_dilation_is_minkowski_sum(img, r, shape):
    se = StructuringElement(r, shape)
    out = dilate(img, se)
    assert np.array_equal(out, minkowski_brute(img, se.offsets()))
    assert np.all(out >= img)  # extensive


@settings(max_examples=40, deadline=None)
@given(arrays(bool, (12, 12)), arrays(bool, (12, 12)), st.integers(1, 3))
def test_dilation_monotone(a, b, r):
    se = StructuringElement(r)
    assert np.all(dilate(a | b, se) >= dilate(a, se))


def test_square_contour():
    img = np.zeros((5, 5), dtype=bool)
    img[1:4, 1:4] = True
    cs = find_contours(img)
    assert len(cs) == 1
    assert len(cs[0]) == 8
    assert set(cs[0].points) == boundary_set(img)


def test_no_contours_in_empty_image():
    assert find_contours(np.zeros((6, 6), bool)) == []


def test_two_blobs():
    img = np.zeros((8, 8), dtype=bool)
    img[1:3, 1:3] = True
    img[5:7, 4:6] = True
    cs = find_contours(img)
    assert [len(c) for c in cs] == [4, 4]


def test_touching_the_border_is_closed():
    img = np.ones((4, 3), dtype=bool)
    (c,) = find_contours(img)
    assert set(c.points) == boundary_set(img)
    assert is_8_adjacent(c.points[-1], c.points[0])


def test_hole_border_discarded():
    img = np.ones((7, 7), dtype=bool)
    img[2:5, 2:5] = False
    img[3, 3] = True  # island inside the hole is its own component
    cs = find_contours(img)
    assert len(cs) == 2
    assert set(cs[0].points) == {p for p in boundary_set(img) if p[0] in (0, 6) or p[1] in (0, 6)}
    assert cs[1].points == ((3, 3),)


def test_largest_contour():
    img = np.zeros((10, 10), dtype=bool)
    img[0:2, 0:2] = True
    img[5:8, 5:8] = True
    cs = find_contours(img)
    assert largest_contour(cs).area == pytest.approx(4.0)  # 3x3 blob, shoelace on centers
    assert largest_contour(cs[:1]) is cs[0]
    twin = np.zeros((10, 10), dtype=bool)
    twin[5:7, 5:7] = True
    twin[1:3, 1:3] = True
    assert largest_contour(find_contours(twin)[::-1]).points[0] == (1, 1)
    with pytest.raises(EmptySliceError):
        largest_contour([])


def test_orient_ccw():
    ccw = Contour(((0, 0), (1, 0), (1, 1), (0, 1)))
    assert orient_ccw(ccw) == (ccw, True)
    cw = Contour(tuple(reversed(ccw.points)))
    flipped, ok = orient_ccw(cw)
    assert ok and flipped.points == ccw.points
    assert shoelace_signed(flipped.points) > 0
    two = Contour(((0, 0), (1, 1)))
    assert orient_ccw(two) == (two, False)


def test_rotate_to_nearest():
    c = Contour(((0, 0), (1, 0), (1, 1), (0, 1)))
    assert rotate_to_nearest(c, (0.9, 1.2)).points == ((1, 1), (0, 1), (0, 0), (1, 0))


def test_pgm(tmp_path):
    img = np.zeros((3, 2), dtype=bool)
    img[2, 1] = True
    write_pgm(tmp_path / "a.pgm", img)
    raw = (tmp_path / "a.pgm").read_bytes()
    assert raw.startswith(b"P5\n3 2\n255\n")
    # y up: pixel (x=2, y=1) lands in the first row, last column
    assert raw[-6:] == bytes([0, 0, 255, 0, 0, 0])


def test_random_blobs_match_boundary_oracle(rng):
    for _ in range(30):
        img = random_blob(rng, 40)
        (c,) = find_contours(img)
        assert set(c.points) == boundary_set(img)
