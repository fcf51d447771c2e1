#include "liquidset/render.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "liquidset/error.hpp"
#include "raster2d.hpp"

namespace liquidset {

namespace {

struct ViewInfo {
  View view;
  std::string_view name;
  Vec3 direction;
  Vec3 up;
};

constexpr std::array<ViewInfo, 6> kViewInfo{{
    {View::Front, "front", {0, 1, 0}, {0, 0, 1}},
    {View::Back, "back", {0, -1, 0}, {0, 0, 1}},
    {View::Left, "left", {1, 0, 0}, {0, 0, 1}},
    {View::Right, "right", {-1, 0, 0}, {0, 0, 1}},
    {View::Top, "top", {0, 0, -1}, {0, 1, 0}},
    {View::Bottom, "bottom", {0, 0, 1}, {0, 1, 0}},
}};

const ViewInfo& info(View v) { return kViewInfo[static_cast<std::size_t>(v)]; }

// Pixel i of n samples coordinate ((2i + 1 - n) / 2n) * extent, so pixel i and
// n - 1 - i are exact negatives of each other.
double pixel_coord(int i, int n, double extent) {
  return static_cast<double>(2 * i + 1 - n) / static_cast<double>(2 * n) * extent;
}

// Inclusive pixel range whose samples may fall in [lo, hi].
std::pair<int, int> pixel_range(double lo, double hi, int n, double extent) {
  const double scale = 2.0 * n / extent;
  const int a = static_cast<int>(std::floor((lo * scale + n - 1) / 2.0)) - 1;
  const int b = static_cast<int>(std::ceil((hi * scale + n - 1) / 2.0)) + 1;
  return {std::max(a, 0), std::min(b, n - 1)};
}

}  // namespace

std::string_view to_string(View view) { return info(view).name; }

std::optional<View> view_from_string(std::string_view name) {
  for (const ViewInfo& v : kViewInfo) {
    if (v.name == name) return v.view;
  }
  return std::nullopt;
}

void OrthoCamera::validate() const {
  if (!(extent_w > 0.0) || !(extent_h > 0.0)) fail(ErrorCode::BadRig, "camera extent must be positive");
  if (width <= 0 || height <= 0) fail(ErrorCode::BadRig, "camera resolution must be positive");
  if (std::abs(norm(direction) - 1.0) > 1e-9 || std::abs(norm(up) - 1.0) > 1e-9 ||
      std::abs(dot(direction, up)) > 1e-9) {
    fail(ErrorCode::BadRig, "camera direction and up must be orthonormal");
  }
}

OrthoCamera make_camera(View view, const Vec3& center, double extent, int resolution, double distance) {
  OrthoCamera cam;
  cam.view = view;
  cam.center = center;
  cam.direction = info(view).direction;
  cam.up = info(view).up;
  cam.extent_w = extent;
  cam.extent_h = extent;
  cam.width = resolution;
  cam.height = resolution;
  cam.distance = distance;
  cam.validate();
  return cam;
}

std::vector<OrthoCamera> make_rig(const Vec3& center, double extent, int resolution, double distance) {
  std::vector<OrthoCamera> rig;
  for (View v : kAllViews) rig.push_back(make_camera(v, center, extent, resolution, distance));
  return rig;
}

MaskImage::MaskImage(int w, int h) : width(w), height(h) {
  if (w < 0 || h < 0) fail(ErrorCode::BadDims, "negative mask size");
  pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
}

std::size_t MaskImage::count() const {
  return static_cast<std::size_t>(std::count_if(pixels.begin(), pixels.end(), [](std::uint8_t p) { return p != 0; }));
}

double MaskImage::fill_fraction() const {
  return pixels.empty() ? 0.0 : static_cast<double>(count()) / static_cast<double>(pixels.size());
}

MaskImage render_mask(const TriMesh& mesh, const OrthoCamera& cam) {
  cam.validate();
  MaskImage mask(cam.width, cam.height);
  if (mesh.empty()) return mask;
  const Vec3 right = cam.right();
  std::vector<detail::Point2> proj(mesh.vertex_count());
  for (std::size_t i = 0; i < proj.size(); ++i) {
    const Vec3 d = mesh.vertices()[i] - cam.center;
    proj[i] = {dot(d, right), dot(d, cam.up)};
  }
  for (const Triangle& t : mesh.triangles()) {
    const detail::Triangle2 tri{proj[t[0]], proj[t[1]], proj[t[2]]};
    const double a_lo = std::min({tri.a.x, tri.b.x, tri.c.x});
    const double a_hi = std::max({tri.a.x, tri.b.x, tri.c.x});
    const double b_lo = std::min({tri.a.y, tri.b.y, tri.c.y});
    const double b_hi = std::max({tri.a.y, tri.b.y, tri.c.y});
    const auto [x0, x1] = pixel_range(a_lo, a_hi, cam.width, cam.extent_w);
    // Rows count downward, so row j samples -pixel_coord(j).
    const auto [y0, y1] = pixel_range(-b_hi, -b_lo, cam.height, cam.extent_h);
    for (int y = y0; y <= y1; ++y) {
      const double v = -pixel_coord(y, cam.height, cam.extent_h);
      for (int x = x0; x <= x1; ++x) {
        if (mask.at(x, y) != 0) continue;
        const double u = pixel_coord(x, cam.width, cam.extent_w);
        if (detail::covers_closed(tri, {u, v})) mask.at(x, y) = 1;
      }
    }
  }
  return mask;
}

std::map<View, MaskImage> render_rig(const TriMesh& mesh, const std::vector<OrthoCamera>& rig) {
  if (rig.size() != kAllViews.size()) fail(ErrorCode::BadRig, "rig must have exactly six cameras");
  std::array<bool, 6> seen{};
  for (const OrthoCamera& cam : rig) {
    auto& flag = seen[static_cast<std::size_t>(cam.view)];
    if (flag) fail(ErrorCode::BadRig, "duplicate view " + std::string(to_string(cam.view)));
    flag = true;
  }
  std::map<View, MaskImage> out;
  for (const OrthoCamera& cam : rig) out.emplace(cam.view, render_mask(mesh, cam));
  return out;
}

MaskImage mirrored(const MaskImage& mask) {
  MaskImage out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) out.at(mask.width - 1 - x, y) = mask.at(x, y);
  }
  return out;
}

}  // namespace liquidset
