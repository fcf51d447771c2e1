#pragma once

// 2D point-in-triangle predicates shared by voxelization and mask rendering.

namespace liquidset::detail {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Triangle2 {
  Point2 a, b, c;
};

inline double orient(const Point2& a, const Point2& b, const Point2& p) {
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

// For a counter-clockwise triangle, points on an edge belong to it only when
// the edge runs downward, or is horizontal and runs toward -x. Each point of a
// tiling is then owned by exactly one triangle.
inline bool owns_edge(const Point2& from, const Point2& to) {
  const double dy = to.y - from.y;
  return dy < 0.0 || (dy == 0.0 && to.x < from.x);
}

inline bool edge_test(const Point2& from, const Point2& to, const Point2& p) {
  const double w = orient(from, to, p);
  return w > 0.0 || (w == 0.0 && owns_edge(from, to));
}

// Half-open coverage test; triangle winding is normalized first. Degenerate
// (zero-area) triangles never cover anything.
inline bool covers_top_left(Triangle2 t, const Point2& p) {
  const double area2 = orient(t.a, t.b, t.c);
  if (area2 == 0.0) return false;
  if (area2 < 0.0) {
    const Point2 tmp = t.b;
    t.b = t.c;
    t.c = tmp;
  }
  return edge_test(t.a, t.b, p) && edge_test(t.b, t.c, p) && edge_test(t.c, t.a, p);
}

// Closed coverage test: points on any edge count as inside.
inline bool covers_closed(const Triangle2& t, const Point2& p) {
  const double w0 = orient(t.a, t.b, p);
  const double w1 = orient(t.b, t.c, p);
  const double w2 = orient(t.c, t.a, p);
  const bool has_neg = w0 < 0.0 || w1 < 0.0 || w2 < 0.0;
  const bool has_pos = w0 > 0.0 || w1 > 0.0 || w2 > 0.0;
  if (has_neg && has_pos) return false;
  return has_neg || has_pos;  // all-zero means degenerate triangle and point on its line
}

}  // namespace liquidset::detail
