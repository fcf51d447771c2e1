#include "liquidset/sdf.hpp"

#include <algorithm>
#include <cmath>

namespace liquidset {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double length2(double x, double y) { return std::sqrt(x * x + y * y); }

double box_distance(const Vec3& p, const Vec3& b) {
  const Vec3 q{std::abs(p.x) - b.x, std::abs(p.y) - b.y, std::abs(p.z) - b.z};
  const Vec3 outside = cwise_max(q, Vec3{});
  return norm(outside) + std::min(std::max(q.x, std::max(q.y, q.z)), 0.0);
}

double cylinder_distance(const Vec3& p, double r, double h) {
  const double dx = length2(p.x, p.y) - r;
  const double dz = std::abs(p.z) - h;
  return std::min(std::max(dx, dz), 0.0) + length2(std::max(dx, 0.0), std::max(dz, 0.0));
}

// Exact capped-cone distance, axis along z.
double cone_distance(const Vec3& p, double r1, double r2, double h) {
  const double qx = length2(p.x, p.y);
  const double qy = p.z;
  const double k1x = r2;
  const double k1y = h;
  const double k2x = r2 - r1;
  const double k2y = 2.0 * h;
  const double cax = qx - std::min(qx, qy < 0.0 ? r1 : r2);
  const double cay = std::abs(qy) - h;
  const double t =
      std::clamp(((k1x - qx) * k2x + (k1y - qy) * k2y) / (k2x * k2x + k2y * k2y), 0.0, 1.0);
  const double cbx = qx - k1x + k2x * t;
  const double cby = qy - k1y + k2y * t;
  const double s = (cbx < 0.0 && cay < 0.0) ? -1.0 : 1.0;
  return s * std::sqrt(std::min(cax * cax + cay * cay, cbx * cbx + cby * cby));
}

}  // namespace

double SdfShape::distance(const Vec3& local) const {
  const Vec3 p = local - offset;
  return std::visit(
      Overloaded{
          [&](const BoxShape& s) { return box_distance(p, s.half_extents); },
          [&](const CylinderShape& s) { return cylinder_distance(p, s.radius, s.half_height); },
          [&](const ConeShape& s) {
            return cone_distance(p, s.bottom_radius, s.top_radius, s.half_height);
          },
          [&](const SphereShape& s) { return norm(p) - s.radius; },
          [&](const CompositeShape& s) {
            double d = s.op == CompositeOp::Union ? std::numeric_limits<double>::infinity()
                                                  : -std::numeric_limits<double>::infinity();
            for (const SdfShape& c : s.children) {
              const double dc = c.distance(p);
              d = s.op == CompositeOp::Union ? std::min(d, dc) : std::max(d, dc);
            }
            return d;
          },
      },
      geometry);
}

Vec3 SdfShape::gradient(const Vec3& local, double h) const {
  const Vec3 ex{h, 0, 0}, ey{0, h, 0}, ez{0, 0, h};
  return Vec3{distance(local + ex) - distance(local - ex), distance(local + ey) - distance(local - ey),
              distance(local + ez) - distance(local - ez)} /
         (2.0 * h);
}

Aabb SdfShape::bounds() const {
  Aabb box = std::visit(
      Overloaded{
          [](const BoxShape& s) { return Aabb{-s.half_extents, s.half_extents}; },
          [](const CylinderShape& s) {
            return Aabb{{-s.radius, -s.radius, -s.half_height}, {s.radius, s.radius, s.half_height}};
          },
          [](const ConeShape& s) {
            const double r = std::max(s.bottom_radius, s.top_radius);
            return Aabb{{-r, -r, -s.half_height}, {r, r, s.half_height}};
          },
          [](const SphereShape& s) {
            return Aabb{{-s.radius, -s.radius, -s.radius}, {s.radius, s.radius, s.radius}};
          },
          [](const CompositeShape& s) {
            Aabb b;
            if (s.op == CompositeOp::Union) {
              for (const SdfShape& c : s.children) b.merge(c.bounds());
            } else if (!s.children.empty()) {
              b = s.children.front().bounds();
              for (const SdfShape& c : s.children) {
                const Aabb cb = c.bounds();
                b.lo = cwise_max(b.lo, cb.lo);
                b.hi = cwise_min(b.hi, cb.hi);
              }
            }
            return b;
          },
      },
      geometry);
  return {box.lo + offset, box.hi + offset};
}

std::optional<double> SdfShape::analytic_volume() const {
  return std::visit(
      Overloaded{
          [](const BoxShape& s) -> std::optional<double> {
            return 8.0 * s.half_extents.x * s.half_extents.y * s.half_extents.z;
          },
          [](const CylinderShape& s) -> std::optional<double> {
            return kPi * s.radius * s.radius * 2.0 * s.half_height;
          },
          [](const ConeShape& s) -> std::optional<double> {
            const double a = s.bottom_radius;
            const double b = s.top_radius;
            return kPi * 2.0 * s.half_height * (a * a + a * b + b * b) / 3.0;
          },
          [](const SphereShape& s) -> std::optional<double> {
            return 4.0 / 3.0 * kPi * s.radius * s.radius * s.radius;
          },
          [](const CompositeShape&) -> std::optional<double> { return std::nullopt; },
      },
      geometry);
}

std::string SdfShape::family() const {
  return std::visit(Overloaded{
                        [](const BoxShape&) { return std::string("box"); },
                        [](const CylinderShape&) { return std::string("cylinder"); },
                        [](const ConeShape&) { return std::string("cone"); },
                        [](const SphereShape&) { return std::string("sphere"); },
                        [](const CompositeShape&) { return std::string("composite"); },
                    },
                    geometry);
}

double SdfShape::min_half_extent() const {
  return std::visit(
      Overloaded{
          [](const BoxShape& s) {
            return std::min({s.half_extents.x, s.half_extents.y, s.half_extents.z});
          },
          [](const CylinderShape& s) { return std::min(s.radius, s.half_height); },
          [](const ConeShape& s) {
            return std::min({std::max(s.bottom_radius, s.top_radius), s.half_height});
          },
          [](const SphereShape& s) { return s.radius; },
          [](const CompositeShape& s) {
            double m = std::numeric_limits<double>::infinity();
            for (const SdfShape& c : s.children) m = std::min(m, c.min_half_extent());
            return m;
          },
      },
      geometry);
}

SdfShape make_box_shape(const Vec3& size, const Vec3& offset) {
  return SdfShape{BoxShape{size * 0.5}, offset, 0.0};
}

SdfShape make_cylinder_shape(double radius, double height, const Vec3& offset) {
  return SdfShape{CylinderShape{radius, height * 0.5}, offset, 0.0};
}

SdfShape make_cone_shape(double bottom_radius, double top_radius, double height, const Vec3& offset) {
  return SdfShape{ConeShape{bottom_radius, top_radius, height * 0.5}, offset, 0.0};
}

SdfShape make_sphere_shape(double radius, const Vec3& offset) {
  return SdfShape{SphereShape{radius}, offset, 0.0};
}

SdfShape make_union_shape(std::vector<SdfShape> children) {
  return SdfShape{CompositeShape{CompositeOp::Union, std::move(children)}, {}, 0.0};
}

SdfShape make_intersection_shape(std::vector<SdfShape> children) {
  return SdfShape{CompositeShape{CompositeOp::Intersection, std::move(children)}, {}, 0.0};
}

CavityMoments cavity_moments(const SdfShape& shape, double h) {
  const Aabb b = shape.bounds();
  const Vec3 ext = b.extent();
  const int nx = std::max(1, static_cast<int>(std::ceil(ext.x / h)));
  const int ny = std::max(1, static_cast<int>(std::ceil(ext.y / h)));
  const int nz = std::max(1, static_cast<int>(std::ceil(ext.z / h)));
  const double cell = h * h * h;
  CavityMoments m;
  Vec3 first;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const Vec3 p = b.lo + Vec3{(i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h};
        if (shape.distance(p) < 0.0) {
          m.volume += cell;
          first += p * cell;
        }
      }
    }
  }
  m.centroid = m.volume > 0.0 ? first / m.volume : b.center();
  return m;
}

}  // namespace liquidset
