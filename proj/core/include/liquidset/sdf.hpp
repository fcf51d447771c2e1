#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "liquidset/vec.hpp"

namespace liquidset {

struct SdfShape;

struct BoxShape {
  Vec3 half_extents;
};

// Capped cylinder along local z, centered at the shape offset.
struct CylinderShape {
  double radius = 0.0;
  double half_height = 0.0;
};

// Truncated cone along local z; bottom radius at -half_height.
struct ConeShape {
  double bottom_radius = 0.0;
  double top_radius = 0.0;
  double half_height = 0.0;
};

struct SphereShape {
  double radius = 0.0;
};

enum class CompositeOp { Union, Intersection };

struct CompositeShape {
  CompositeOp op = CompositeOp::Union;
  std::vector<SdfShape> children;
};

// Analytic container cavity. distance() is negative inside the cavity.
// wall_thickness only affects the exported shell mesh.
struct SdfShape {
  std::variant<BoxShape, CylinderShape, ConeShape, SphereShape, CompositeShape> geometry;
  Vec3 offset;
  double wall_thickness = 0.0;

  double distance(const Vec3& local) const;
  Vec3 gradient(const Vec3& local, double h = 1e-6) const;
  Aabb bounds() const;
  // Exact volume for primitives; empty for composites.
  std::optional<double> analytic_volume() const;
  std::string family() const;
  // Smallest half-extent over the primitive dimensions.
  double min_half_extent() const;
};

SdfShape make_box_shape(const Vec3& size, const Vec3& offset = {});
SdfShape make_cylinder_shape(double radius, double height, const Vec3& offset = {});
SdfShape make_cone_shape(double bottom_radius, double top_radius, double height,
                         const Vec3& offset = {});
SdfShape make_sphere_shape(double radius, const Vec3& offset = {});
SdfShape make_union_shape(std::vector<SdfShape> children);
SdfShape make_intersection_shape(std::vector<SdfShape> children);

// Volume and centroid of the cavity by midpoint sampling on a grid of spacing h.
struct CavityMoments {
  double volume = 0.0;
  Vec3 centroid;
};
CavityMoments cavity_moments(const SdfShape& shape, double h);

}  // namespace liquidset
