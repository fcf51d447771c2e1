#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "liquidset/mesh.hpp"
#include "liquidset/vec.hpp"

namespace liquidset {

enum class View { Front, Back, Left, Right, Top, Bottom };

inline constexpr std::array<View, 6> kAllViews{View::Front, View::Back, View::Left,
                                               View::Right, View::Top,  View::Bottom};

std::string_view to_string(View view);
std::optional<View> view_from_string(std::string_view name);

// Orthographic camera. Image rows run top to bottom and the horizontal axis is
// direction x up.
struct OrthoCamera {
  View view = View::Front;
  Vec3 center;            // look-at point, m
  Vec3 direction;         // unit, from camera into the scene
  Vec3 up;                // unit, perpendicular to direction
  double extent_w = 1.0;  // m
  double extent_h = 1.0;  // m
  int width = 512;        // px
  int height = 512;       // px
  double distance = 1.0;  // m, recorded only

  Vec3 right() const { return cross(direction, up); }
  // Throws BadRig on a zero extent, resolution or non-orthonormal basis.
  void validate() const;
};

// Camera for one of the six rig views looking at `center`:
//   front +Y, back -Y, left +X, right -X (up +Z); top -Z, bottom +Z (up +Y).
OrthoCamera make_camera(View view, const Vec3& center, double extent, int resolution,
                        double distance = 1.0);
std::vector<OrthoCamera> make_rig(const Vec3& center, double extent, int resolution,
                                  double distance = 1.0);

struct MaskImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 0 or 1

  MaskImage() = default;
  MaskImage(int w, int h);

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t count() const;
  double fill_fraction() const;
  bool operator==(const MaskImage&) const = default;
};

// A pixel is set iff the ray through its center hits the mesh (boundary
// inclusive).
MaskImage render_mask(const TriMesh& mesh, const OrthoCamera& cam);

// Requires exactly one camera per view label; throws BadRig otherwise.
std::map<View, MaskImage> render_rig(const TriMesh& mesh, const std::vector<OrthoCamera>& rig);

// Horizontal flip, x -> width - 1 - x.
MaskImage mirrored(const MaskImage& mask);

}  // namespace liquidset
