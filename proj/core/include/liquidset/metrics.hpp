#pragma once

#include <cstdint>
#include <vector>

#include "liquidset/mesh.hpp"
#include "liquidset/render.hpp"
#include "liquidset/vec.hpp"

namespace liquidset {

inline constexpr std::size_t kDefaultSamples = 10'000;
inline constexpr int kDefaultIouResolution = 64;
inline constexpr double kDefaultFScoreTau = 0.005;  // m

// |a and b| / |a or b|; 1 when both are empty. Throws ShapeMismatch.
double mask_iou(const MaskImage& a, const MaskImage& b);

// Area-weighted uniform samples. Throws EmptyMesh.
std::vector<Vec3> sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed);

// Distance from each query point to its nearest neighbor in `cloud`.
std::vector<double> nearest_distances(const std::vector<Vec3>& queries, const std::vector<Vec3>& cloud);

// 0.5 * mean_a min_b |a - b| + 0.5 * mean_b min_a |a - b| over n samples per
// mesh. Requires n >= 100.
double chamfer_distance(const TriMesh& a, const TriMesh& b, std::size_t n = kDefaultSamples,
                        std::uint64_t seed_a = 0, std::uint64_t seed_b = 0);

// Occupancy IoU on the union AABB at `res` cells along its longest side.
double volume_iou(const TriMesh& a, const TriMesh& b, int res = kDefaultIouResolution);

// 2PR / (P + R) * 100, P and R the fractions of samples within tau of the
// other mesh's samples.
double f_score(const TriMesh& a, const TriMesh& b, double tau = kDefaultFScoreTau, std::size_t n = kDefaultSamples,
               std::uint64_t seed_a = 0, std::uint64_t seed_b = 0);

// RMSE pooled over all 3k axis values. Throws ShapeMismatch.
double dims_rmse(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt);
// Same, with each pair divided by the largest extent of its ground truth.
double dims_rmse_normalized(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt);

// s = cbrt(Sx/Vx * Sy/Vy * Sz/Vz). Throws BadDims for a non-positive extent.
double scaling_factor(const Vec3& real_dims, const Vec3& model_dims);

// mean(|pred - gt| / |gt|) * 100. Throws BadReference for a zero gt entry.
double mape(const std::vector<double>& pred, const std::vector<double>& gt);

}  // namespace liquidset
