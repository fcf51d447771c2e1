#include "liquidset/vec.hpp"

namespace liquidset {

Mat3 rotation_x(double degrees) {
  const double c = std::cos(deg_to_rad(degrees));
  const double s = std::sin(deg_to_rad(degrees));
  return Mat3{{1, 0, 0, 0, c, -s, 0, s, c}};
}

Mat3 rotation_y(double degrees) {
  const double c = std::cos(deg_to_rad(degrees));
  const double s = std::sin(deg_to_rad(degrees));
  return Mat3{{c, 0, s, 0, 1, 0, -s, 0, c}};
}

Mat3 rotation_z(double degrees) {
  const double c = std::cos(deg_to_rad(degrees));
  const double s = std::sin(deg_to_rad(degrees));
  return Mat3{{c, -s, 0, s, c, 0, 0, 0, 1}};
}

Mat3 rotation_axis_angle(const Vec3& axis, double radians) {
  const double n = norm(axis);
  if (n == 0.0 || radians == 0.0) return Mat3::identity();
  const Vec3 k = axis / n;
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  const double t = 1.0 - c;
  return Mat3{{t * k.x * k.x + c, t * k.x * k.y - s * k.z, t * k.x * k.z + s * k.y,
               t * k.x * k.y + s * k.z, t * k.y * k.y + c, t * k.y * k.z - s * k.x,
               t * k.x * k.z - s * k.y, t * k.y * k.z + s * k.x, t * k.z * k.z + c}};
}

Vec3 rotation_log(const Mat3& r) {
  const double trace = r(0, 0) + r(1, 1) + r(2, 2);
  const double cos_angle = std::clamp((trace - 1.0) * 0.5, -1.0, 1.0);
  const double angle = std::acos(cos_angle);
  const Vec3 w{r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)};
  if (angle < 1e-12) return w * 0.5;
  const double s = std::sin(angle);
  if (s > 1e-9) return w * (angle / (2.0 * s));
  // angle ~ pi: axis from the diagonal.
  Vec3 axis{std::sqrt(std::max(0.0, (r(0, 0) + 1.0) * 0.5)),
            std::sqrt(std::max(0.0, (r(1, 1) + 1.0) * 0.5)),
            std::sqrt(std::max(0.0, (r(2, 2) + 1.0) * 0.5))};
  if (r(0, 1) + r(1, 0) < 0.0) axis.y = -axis.y;
  if (r(0, 2) + r(2, 0) < 0.0) axis.z = -axis.z;
  return normalized(axis) * angle;
}

Mat3 RigidPose::rotation() const {
  return rotation_z(angles_deg.z) * rotation_y(angles_deg.y) * rotation_x(angles_deg.x);
}

Vec3 RigidPose::to_world(const Vec3& local) const { return rotation() * (local - pivot) + pivot; }

Vec3 RigidPose::to_local(const Vec3& world) const {
  return rotation().transposed() * (world - pivot) + pivot;
}

RigidTransform RigidTransform::from_pose(const RigidPose& pose) {
  const Mat3 r = pose.rotation();
  return {r, pose.pivot - r * pose.pivot};
}

RigidTransform RigidTransform::inverse() const {
  const Mat3 rt = r.transposed();
  return {rt, -(rt * t)};
}

}  // namespace liquidset
