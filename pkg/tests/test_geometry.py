import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oknn.geometry import (
    EPS_GEOM,
    DegenerateSegmentError,
    Orientation,
    Overlap,
    Point,
    Segment,
    closest_point_on_segment,
    dist,
    is_simple_polygon,
    mirror_across_line,
    on_segment,
    orientation,
    point_in_polygon,
    segment_intersection,
    signed_area,
)

coord = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
points = st.builds(Point, coord, coord)


def test_orientation_examples():
    assert orientation((0, 0), (1, 0), (0, 1)) == Orientation.LEFT
    assert orientation((0, 0), (1, 0), (2, 0)) == Orientation.COLLINEAR
    assert orientation((0, 0), (1, 0), (0, -1)) == Orientation.RIGHT


def test_closest_point_examples():
    p, d = closest_point_on_segment((2, 0), Segment(Point(0, 2), Point(4, 2)))
    assert p == (2, 2) and d == 2.0
    p, d = closest_point_on_segment((-1, 0), Segment(Point(0, 0), Point(4, 0)))
    assert p == (0, 0) and d == 1.0
    p, d = closest_point_on_segment((3, 4), Segment(Point(0, 0), Point(0, 0)))
    assert p == (0, 0) and d == 5.0


def test_mirror_examples():
    assert mirror_across_line((0, 0.5), Segment(Point(1, -1), Point(1, 1))) == pytest.approx((2, 0.5))
    assert mirror_across_line((5, 5), Segment(Point(0, 0), Point(10, 0))) == pytest.approx((5, -5))
    assert mirror_across_line((1, 0), Segment(Point(1, -1), Point(1, 1))) == pytest.approx((1, 0))


def test_mirror_degenerate_segment():
    with pytest.raises(DegenerateSegmentError):
        mirror_across_line((1, 2), Segment(Point(3, 3), Point(3, 3)))


def test_segment_intersection_examples():
    assert segment_intersection(((0, 0), (2, 0)), ((1, -1), (1, 1))) == pytest.approx((1, 0))
    assert segment_intersection(((0, 0), (1, 0)), ((0, 1), (1, 1))) is None
    assert segment_intersection(((0, 0), (2, 2)), ((2, 2), (4, 0))) == pytest.approx((2, 2))


def test_segment_intersection_degenerate_segment():
    # a near-zero segment is a point, not a direction parallel to everything
    assert segment_intersection(((0, 0), (0, 2.220446049250313e-16)), ((0, 1), (1, 0))) is None
    assert segment_intersection(((0.5, 0.5), (0.5, 0.5)), ((0, 1), (1, 0))) == pytest.approx((0.5, 0.5))


def test_segment_intersection_collinear_overlap():
    res = segment_intersection(((0, 0), (4, 0)), ((2, 0), (6, 0)))
    assert isinstance(res, Overlap)
    assert sorted([tuple(res.a), tuple(res.b)]) == [(2, 0), (4, 0)]


def test_polygon_helpers():
    square = [(0, 0), (2, 0), (2, 2), (0, 2)]
    assert signed_area(square) == 4.0
    assert point_in_polygon((1, 1), square)
    assert not point_in_polygon((3, 1), square)
    assert is_simple_polygon(square)
    assert not is_simple_polygon([(0, 0), (2, 2), (2, 0), (0, 2)])


@given(points, points, points)
def test_orientation_antisymmetric(p, q, r):
    assert orientation(p, q, r) == -orientation(p, r, q)


@given(points, points, points)
def test_closest_point_no_farther_than_endpoints(p, a, b):
    c, d = closest_point_on_segment(p, Segment(a, b))
    assert d <= min(dist(p, a), dist(p, b)) + 1e-9
    assert on_segment(c, a, b, eps=1e-6)


@given(points, points, points)
def test_mirror_preserves_distance_to_line_points(p, a, b):
    if dist(a, b) < 1e-3:
        return
    s = Segment(a, b)
    m = mirror_across_line(p, s)
    mid = Point((a.x + b.x) / 2, (a.y + b.y) / 2)
    scale = max(1.0, dist(p, a), dist(p, b))
    for x in (a, b, mid):
        assert abs(dist(m, x) - dist(p, x)) <= EPS_GEOM * scale * 1e3
    back = mirror_across_line(m, s)
    assert abs(back.x - p.x) <= 1e-6 * scale and abs(back.y - p.y) <= 1e-6 * scale


@settings(max_examples=300)
@given(points, points, points, points)
def test_intersection_lies_on_both_segments(a, b, c, d):
    res = segment_intersection((a, b), (c, d))
    if isinstance(res, Point):
        scale = max(1.0, *(abs(v) for v in (*a, *b, *c, *d)))
        assert on_segment(res, a, b, eps=1e-7 * scale)
        assert on_segment(res, c, d, eps=1e-7 * scale)
