#include "liquidset/metrics.hpp"

#include <algorithm>
#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <cmath>
#include <numeric>

#include "liquidset/error.hpp"
#include "liquidset/voxel.hpp"
#include "rng.hpp"

namespace liquidset {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace {

using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;

void require_samples(std::size_t n) {
  if (n < 100) fail(ErrorCode::BadConfig, "need at least 100 samples per mesh");
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double fraction_within(const std::vector<double>& d, double tau) {
  const auto hits = std::count_if(d.begin(), d.end(), [tau](double x) { return x <= tau; });
  return static_cast<double>(hits) / static_cast<double>(d.size());
}

void check_pairs(std::size_t a, std::size_t b) {
  if (a != b) fail(ErrorCode::ShapeMismatch, "lists differ in length");
  if (a == 0) fail(ErrorCode::ShapeMismatch, "lists are empty");
}

}  // namespace

double mask_iou(const MaskImage& a, const MaskImage& b) {
  if (a.width != b.width || a.height != b.height) fail(ErrorCode::ShapeMismatch, "mask sizes differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const bool pa = a.pixels[i] != 0;
    const bool pb = b.pixels[i] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<Vec3> sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (mesh.triangle_count() == 0) fail(ErrorCode::EmptyMesh, "cannot sample an empty mesh");
  const auto& tris = mesh.triangles();
  const auto& verts = mesh.vertices();
  std::vector<double> cumulative(tris.size());
  double total = 0.0;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    total += triangle_area(verts[tris[i][0]], verts[tris[i][1]], verts[tris[i][2]]);
    cumulative[i] = total;
  }
  Rng rng(seed);
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double pick = rng.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), tris.size() - 1);
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const Vec3& a = verts[tris[t][0]];
    const Vec3& b = verts[tris[t][1]];
    const Vec3& c = verts[tris[t][2]];
    out.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
  }
  return out;
}

std::vector<double> nearest_distances(const std::vector<Vec3>& queries, const std::vector<Vec3>& cloud) {
  if (cloud.empty()) fail(ErrorCode::EmptyMesh, "empty point cloud");
  std::vector<BPoint> pts;
  pts.reserve(cloud.size());
  for (const Vec3& p : cloud) pts.emplace_back(p.x, p.y, p.z);
  const bgi::rtree<BPoint, bgi::rstar<16>> tree(pts.begin(), pts.end());
  std::vector<double> out;
  out.reserve(queries.size());
  std::vector<BPoint> hit;
  for (const Vec3& q : queries) {
    hit.clear();
    tree.query(bgi::nearest(BPoint(q.x, q.y, q.z), 1), std::back_inserter(hit));
    const Vec3 h{bg::get<0>(hit[0]), bg::get<1>(hit[0]), bg::get<2>(hit[0])};
    out.push_back(norm(q - h));
  }
  return out;
}

double chamfer_distance(const TriMesh& a, const TriMesh& b, std::size_t n, std::uint64_t seed_a,
                        std::uint64_t seed_b) {
  require_samples(n);
  const auto sa = sample_surface(a, n, seed_a);
  const auto sb = sample_surface(b, n, seed_b);
  return 0.5 * mean(nearest_distances(sa, sb)) + 0.5 * mean(nearest_distances(sb, sa));
}

double volume_iou(const TriMesh& a, const TriMesh& b, int res) {
  if (a.empty() || b.empty()) fail(ErrorCode::EmptyMesh, "volume IoU needs non-empty meshes");
  Aabb bounds = mesh_aabb(a);
  bounds.merge(mesh_aabb(b));
  const OccupancyGrid ga = voxelize(a, res, bounds);
  const OccupancyGrid gb = voxelize(b, res, bounds);
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < ga.data().size(); ++i) {
    const bool pa = ga.data()[i] != 0;
    const bool pb = gb.data()[i] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double f_score(const TriMesh& a, const TriMesh& b, double tau, std::size_t n, std::uint64_t seed_a,
               std::uint64_t seed_b) {
  if (!(tau > 0.0)) fail(ErrorCode::BadConfig, "tau must be positive");
  require_samples(n);
  const auto sa = sample_surface(a, n, seed_a);
  const auto sb = sample_surface(b, n, seed_b);
  const double precision = fraction_within(nearest_distances(sa, sb), tau);
  const double recall = fraction_within(nearest_distances(sb, sa), tau);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall) * 100.0;
}

double dims_rmse(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt) {
  check_pairs(pred.size(), gt.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const Vec3 d = pred[i] - gt[i];
    sum += dot(d, d);
  }
  return std::sqrt(sum / (3.0 * static_cast<double>(pred.size())));
}

double dims_rmse_normalized(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt) {
  check_pairs(pred.size(), gt.size());
  std::vector<Vec3> p(pred.size());
  std::vector<Vec3> g(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double scale = std::max({gt[i].x, gt[i].y, gt[i].z});
    if (!(scale > 0.0)) fail(ErrorCode::BadDims, "ground-truth dims must be positive");
    p[i] = pred[i] / scale;
    g[i] = gt[i] / scale;
  }
  return dims_rmse(p, g);
}

double scaling_factor(const Vec3& real_dims, const Vec3& model_dims) {
  for (int a = 0; a < 3; ++a) {
    if (!(real_dims[a] > 0.0) || !(model_dims[a] > 0.0)) fail(ErrorCode::BadDims, "extents must be positive");
  }
  return std::cbrt(real_dims.x / model_dims.x * (real_dims.y / model_dims.y) * (real_dims.z / model_dims.z));
}

double mape(const std::vector<double>& pred, const std::vector<double>& gt) {
  check_pairs(pred.size(), gt.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (gt[i] == 0.0) fail(ErrorCode::BadReference, "ground truth entry " + std::to_string(i) + " is zero");
    sum += std::abs(pred[i] - gt[i]) / std::abs(gt[i]);
  }
  return sum / static_cast<double>(pred.size()) * 100.0;
}

}  // namespace liquidset
