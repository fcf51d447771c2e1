#include "liquidset/marching.hpp"

#include <algorithm>
#include <unordered_map>

namespace liquidset {

namespace {

// Cube corner c has offset (c & 1, (c >> 1) & 1, (c >> 2) & 1).
constexpr std::array<std::array<int, 4>, 6> kTets = {{
    {0, 1, 3, 7},  // x, y, z
    {0, 1, 5, 7},  // x, z, y
    {0, 2, 3, 7},  // y, x, z
    {0, 2, 6, 7},  // y, z, x
    {0, 4, 5, 7},  // z, x, y
    {0, 4, 6, 7},  // z, y, x
}};

// Keeps crossing points away from grid nodes so no triangle collapses.
constexpr double kMinFraction = 0.01;

class Extractor {
 public:
  Extractor(const ScalarGrid& grid, double iso) : grid_(grid), iso_(iso) {}

  TriMesh run() {
    const auto [nx, ny, nz] = grid_.dims();
    for (int k = 0; k + 1 < nz; ++k) {
      for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) process_cube(i, j, k);
      }
    }
    return TriMesh(std::move(vertices_), std::move(triangles_));
  }

 private:
  void process_cube(int i, int j, int k) {
    std::array<std::size_t, 8> node{};
    std::array<double, 8> value{};
    int inside = 0;
    for (int c = 0; c < 8; ++c) {
      node[c] = grid_.index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
      value[c] = grid_.data()[node[c]];
      if (value[c] < iso_) ++inside;
    }
    if (inside == 0 || inside == 8) return;
    for (const auto& tet : kTets) {
      std::array<std::size_t, 4> tn{};
      std::array<double, 4> tv{};
      for (int v = 0; v < 4; ++v) {
        tn[v] = node[tet[v]];
        tv[v] = value[tet[v]];
      }
      process_tet(tn, tv);
    }
  }

  void process_tet(const std::array<std::size_t, 4>& n, const std::array<double, 4>& v) {
    std::array<int, 4> in{};
    std::array<int, 4> out{};
    int n_in = 0;
    int n_out = 0;
    for (int c = 0; c < 4; ++c) {
      if (v[c] < iso_) {
        in[n_in++] = c;
      } else {
        out[n_out++] = c;
      }
    }
    if (n_in == 0 || n_out == 0) return;
    auto vert = [&](int a, int b) { return crossing(n[a], v[a], n[b], v[b]); };
    const Vec3 dir = node_position(n[out[0]]) - node_position(n[in[0]]);
    if (n_in == 1) {
      emit(vert(in[0], out[0]), vert(in[0], out[1]), vert(in[0], out[2]), dir);
    } else if (n_out == 1) {
      emit(vert(in[0], out[0]), vert(in[1], out[0]), vert(in[2], out[0]), dir);
    } else {
      // Quad in cyclic order around the separating plane.
      const std::uint32_t q0 = vert(in[0], out[0]);
      const std::uint32_t q1 = vert(in[0], out[1]);
      const std::uint32_t q2 = vert(in[1], out[1]);
      const std::uint32_t q3 = vert(in[1], out[0]);
      emit(q0, q1, q2, dir);
      emit(q0, q2, q3, dir);
    }
  }

  Vec3 node_position(std::size_t idx) const {
    const auto& d = grid_.dims();
    const auto i = static_cast<int>(idx % d[0]);
    const auto j = static_cast<int>((idx / d[0]) % d[1]);
    const auto k = static_cast<int>(idx / (static_cast<std::size_t>(d[0]) * d[1]));
    return grid_.position(i, j, k);
  }

  std::uint32_t crossing(std::size_t a, double va, std::size_t b, double vb) {
    // Canonical order so both sides of a shared edge compute the same point.
    if (a > b) {
      std::swap(a, b);
      std::swap(va, vb);
    }
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
    auto it = edge_vertex_.find(key);
    if (it != edge_vertex_.end()) return it->second;
    double t = (iso_ - va) / (vb - va);
    t = std::clamp(t, kMinFraction, 1.0 - kMinFraction);
    const Vec3 pa = node_position(a);
    const Vec3 pb = node_position(b);
    vertices_.push_back(pa + (pb - pa) * t);
    const auto id = static_cast<std::uint32_t>(vertices_.size() - 1);
    edge_vertex_.emplace(key, id);
    return id;
  }

  void emit(std::uint32_t a, std::uint32_t b, std::uint32_t c, const Vec3& outward) {
    const Vec3 normal = cross(vertices_[b] - vertices_[a], vertices_[c] - vertices_[a]);
    if (dot(normal, outward) < 0.0) std::swap(b, c);
    triangles_.push_back({a, b, c});
  }

  const ScalarGrid& grid_;
  double iso_;
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex_;
};

}  // namespace

TriMesh marching_cubes(const ScalarGrid& grid, double iso) {
  const auto& d = grid.dims();
  if (d[0] < 2 || d[1] < 2 || d[2] < 2) fail(ErrorCode::BadDims, "marching_cubes needs >= 2 samples per axis");
  return Extractor(grid, iso).run();
}

}  // namespace liquidset
