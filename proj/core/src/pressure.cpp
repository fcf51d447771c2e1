#include <algorithm>
#include <cmath>
#include <deque>

#include "liquidset/error.hpp"
#include "liquidset/fluid.hpp"

namespace liquidset {

namespace {

constexpr double kMicTuning = 0.97;
constexpr double kMicSafety = 0.25;

// Seven-point Poisson matrix over the full cell array; rows of non-fluid cells are zero.
struct PoissonSystem {
  std::vector<double> diag;
  std::vector<double> plus_i;
  std::vector<double> plus_j;
  std::vector<double> plus_k;
  std::vector<double> precon;
};

class Projector {
 public:
  Projector(MacGrid& grid, const SimParams& params) : g_(grid), params_(params) {}

  ProjectionStats run() {
    apply_solid_faces();
    collect_fluid();
    ProjectionStats stats;
    stats.fluid_cells = fluid_.size();
    if (fluid_.empty()) return stats;

    build_rhs();
    remove_null_space();
    build_matrix();
    build_preconditioner();
    solve(stats);
    apply_gradient();
    stats.max_divergence = g_.max_fluid_divergence();
    return stats;
  }

 private:
  bool is_fluid(int i, int j, int k) const { return g_.label_or_solid(i, j, k) == CellLabel::Fluid; }
  bool is_solid(int i, int j, int k) const { return g_.label_or_solid(i, j, k) == CellLabel::Solid; }

  void apply_solid_faces() {
    for (int a = 0; a < 3; ++a) {
      const Axis ax = static_cast<Axis>(a);
      const auto d = g_.face_dims(ax);
      auto& vel = g_.velocity(ax);
      const auto& svel = g_.solid_velocity(ax);
      for (int k = 0; k < d[2]; ++k) {
        for (int j = 0; j < d[1]; ++j) {
          for (int i = 0; i < d[0]; ++i) {
            int li = i, lj = j, lk = k;
            (a == 0 ? li : a == 1 ? lj : lk) -= 1;
            if (is_solid(li, lj, lk) || is_solid(i, j, k)) {
              const std::size_t f = g_.face_index(ax, i, j, k);
              vel[f] = svel[f];
            }
          }
        }
      }
    }
  }

  void collect_fluid() {
    for (int k = 0; k < g_.nz(); ++k)
      for (int j = 0; j < g_.ny(); ++j)
        for (int i = 0; i < g_.nx(); ++i)
          if (is_fluid(i, j, k)) fluid_.push_back(g_.cell_index(i, j, k));
  }

  void build_rhs() {
    rhs_.assign(g_.cell_count(), 0.0);
    for (int k = 0; k < g_.nz(); ++k)
      for (int j = 0; j < g_.ny(); ++j)
        for (int i = 0; i < g_.nx(); ++i)
          if (is_fluid(i, j, k)) rhs_[g_.cell_index(i, j, k)] = -g_.divergence(i, j, k);
  }

  // A fluid component with no empty neighbour has only Neumann boundaries;
  // its right-hand side must sum to zero for the system to be solvable.
  void remove_null_space() {
    std::vector<int> component(g_.cell_count(), -1);
    const int nx = g_.nx(), ny = g_.ny();
    int next = 0;
    for (std::size_t seed : fluid_) {
      if (component[seed] >= 0) continue;
      std::vector<std::size_t> members;
      bool has_dirichlet = false;
      std::deque<std::size_t> queue{seed};
      component[seed] = next;
      while (!queue.empty()) {
        const std::size_t c = queue.front();
        queue.pop_front();
        members.push_back(c);
        const int i = static_cast<int>(c % nx);
        const int j = static_cast<int>((c / nx) % ny);
        const int k = static_cast<int>(c / (static_cast<std::size_t>(nx) * ny));
        const int nb[6][3] = {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k},
                              {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}};
        for (const auto& n : nb) {
          const CellLabel l = g_.label_or_solid(n[0], n[1], n[2]);
          if (l == CellLabel::Empty) has_dirichlet = true;
          if (l != CellLabel::Fluid) continue;
          const std::size_t nc = g_.cell_index(n[0], n[1], n[2]);
          if (component[nc] < 0) {
            component[nc] = next;
            queue.push_back(nc);
          }
        }
      }
      ++next;
      if (has_dirichlet) continue;
      double mean = 0.0;
      for (std::size_t c : members) mean += rhs_[c];
      mean /= static_cast<double>(members.size());
      for (std::size_t c : members) rhs_[c] -= mean;
    }
  }

  void build_matrix() {
    const double scale = 1.0 / (g_.dx() * g_.dx());
    const std::size_t n = g_.cell_count();
    sys_.diag.assign(n, 0.0);
    sys_.plus_i.assign(n, 0.0);
    sys_.plus_j.assign(n, 0.0);
    sys_.plus_k.assign(n, 0.0);
    for (int k = 0; k < g_.nz(); ++k) {
      for (int j = 0; j < g_.ny(); ++j) {
        for (int i = 0; i < g_.nx(); ++i) {
          if (!is_fluid(i, j, k)) continue;
          const std::size_t c = g_.cell_index(i, j, k);
          const int nb[6][3] = {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k},
                                {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}};
          for (const auto& q : nb) {
            if (!is_solid(q[0], q[1], q[2])) sys_.diag[c] += scale;
          }
          if (is_fluid(i + 1, j, k)) sys_.plus_i[c] = -scale;
          if (is_fluid(i, j + 1, k)) sys_.plus_j[c] = -scale;
          if (is_fluid(i, j, k + 1)) sys_.plus_k[c] = -scale;
        }
      }
    }
  }

  void build_preconditioner() {
    const int nx = g_.nx(), ny = g_.ny();
    const std::size_t sj = static_cast<std::size_t>(nx);
    const std::size_t sk = static_cast<std::size_t>(nx) * ny;
    sys_.precon.assign(g_.cell_count(), 0.0);
    for (std::size_t c : fluid_) {
      const int i = static_cast<int>(c % nx);
      const int j = static_cast<int>((c / nx) % ny);
      const int k = static_cast<int>(c / sk);
      double e = sys_.diag[c];
      if (i > 0 && is_fluid(i - 1, j, k)) {
        const std::size_t m = c - 1;
        const double a = sys_.plus_i[m] * sys_.precon[m];
        e -= a * a + kMicTuning * sys_.plus_i[m] * (sys_.plus_j[m] + sys_.plus_k[m]) * sys_.precon[m] * sys_.precon[m];
      }
      if (j > 0 && is_fluid(i, j - 1, k)) {
        const std::size_t m = c - sj;
        const double a = sys_.plus_j[m] * sys_.precon[m];
        e -= a * a + kMicTuning * sys_.plus_j[m] * (sys_.plus_i[m] + sys_.plus_k[m]) * sys_.precon[m] * sys_.precon[m];
      }
      if (k > 0 && is_fluid(i, j, k - 1)) {
        const std::size_t m = c - sk;
        const double a = sys_.plus_k[m] * sys_.precon[m];
        e -= a * a + kMicTuning * sys_.plus_k[m] * (sys_.plus_i[m] + sys_.plus_j[m]) * sys_.precon[m] * sys_.precon[m];
      }
      if (e < kMicSafety * sys_.diag[c]) e = sys_.diag[c];
      sys_.precon[c] = e > 0.0 ? 1.0 / std::sqrt(e) : 0.0;
    }
  }

  void apply_matrix(const std::vector<double>& x, std::vector<double>& out) const {
    const std::size_t sj = static_cast<std::size_t>(g_.nx());
    const std::size_t sk = sj * g_.ny();
    for (std::size_t c : fluid_) {
      double s = sys_.diag[c] * x[c];
      s += sys_.plus_i[c] * x[c + 1];
      s += sys_.plus_j[c] * x[c + sj];
      s += sys_.plus_k[c] * x[c + sk];
      if (c >= 1) s += sys_.plus_i[c - 1] * x[c - 1];
      if (c >= sj) s += sys_.plus_j[c - sj] * x[c - sj];
      if (c >= sk) s += sys_.plus_k[c - sk] * x[c - sk];
      out[c] = s;
    }
  }

  void apply_preconditioner(const std::vector<double>& r, std::vector<double>& z) {
    const std::size_t sj = static_cast<std::size_t>(g_.nx());
    const std::size_t sk = sj * g_.ny();
    auto& q = scratch_;
    q.assign(g_.cell_count(), 0.0);
    for (std::size_t c : fluid_) {
      double t = r[c];
      if (c >= 1) t -= sys_.plus_i[c - 1] * sys_.precon[c - 1] * q[c - 1];
      if (c >= sj) t -= sys_.plus_j[c - sj] * sys_.precon[c - sj] * q[c - sj];
      if (c >= sk) t -= sys_.plus_k[c - sk] * sys_.precon[c - sk] * q[c - sk];
      q[c] = t * sys_.precon[c];
    }
    for (auto it = fluid_.rbegin(); it != fluid_.rend(); ++it) {
      const std::size_t c = *it;
      double t = q[c];
      t -= sys_.plus_i[c] * sys_.precon[c] * z[c + 1];
      t -= sys_.plus_j[c] * sys_.precon[c] * z[c + sj];
      t -= sys_.plus_k[c] * sys_.precon[c] * z[c + sk];
      z[c] = t * sys_.precon[c];
    }
  }

  double dot_fluid(const std::vector<double>& a, const std::vector<double>& b) const {
    double s = 0.0;
    for (std::size_t c : fluid_) s += a[c] * b[c];
    return s;
  }

  double max_abs_fluid(const std::vector<double>& a) const {
    double m = 0.0;
    for (std::size_t c : fluid_) m = std::max(m, std::abs(a[c]));
    return m;
  }

  void solve(ProjectionStats& stats) {
    // Padded by one layer so neighbour reads past the last fluid cell stay in bounds.
    const std::size_t n = g_.cell_count() + static_cast<std::size_t>(g_.nx()) * g_.ny() + g_.nx() + 1;
    potential_.assign(n, 0.0);
    std::vector<double> r(n, 0.0), z(n, 0.0), s(n, 0.0), as(n, 0.0);
    for (std::size_t c : fluid_) r[c] = rhs_[c];
    sys_.diag.resize(n, 0.0);
    sys_.plus_i.resize(n, 0.0);
    sys_.plus_j.resize(n, 0.0);
    sys_.plus_k.resize(n, 0.0);
    sys_.precon.resize(n, 0.0);

    const double tol = params_.pressure_tolerance;
    double residual = max_abs_fluid(r);
    stats.residual = residual;
    if (!std::isfinite(residual)) fail(ErrorCode::NumericalBlowup, "non-finite velocity divergence");
    if (residual <= tol) return;

    apply_preconditioner(r, z);
    s = z;
    double sigma = dot_fluid(z, r);
    for (int it = 1; it <= params_.pressure_max_iterations; ++it) {
      apply_matrix(s, as);
      const double denom = dot_fluid(s, as);
      if (denom <= 0.0) break;
      const double alpha = sigma / denom;
      for (std::size_t c : fluid_) {
        potential_[c] += alpha * s[c];
        r[c] -= alpha * as[c];
      }
      residual = max_abs_fluid(r);
      stats.iterations = it;
      stats.residual = residual;
      if (residual <= tol) return;
      apply_preconditioner(r, z);
      const double sigma_new = dot_fluid(z, r);
      const double beta = sigma_new / sigma;
      for (std::size_t c : fluid_) s[c] = z[c] + beta * s[c];
      sigma = sigma_new;
    }
    Error err(ErrorCode::NonConverged, "pressure solve did not reach tolerance");
    err.residual = residual;
    throw err;
  }

  void apply_gradient() {
    const double inv_dx = 1.0 / g_.dx();
    auto q = [&](int i, int j, int k) -> double {
      return is_fluid(i, j, k) ? potential_[g_.cell_index(i, j, k)] : 0.0;
    };
    for (int a = 0; a < 3; ++a) {
      const Axis ax = static_cast<Axis>(a);
      const auto d = g_.face_dims(ax);
      auto& vel = g_.velocity(ax);
      for (int k = 0; k < d[2]; ++k) {
        for (int j = 0; j < d[1]; ++j) {
          for (int i = 0; i < d[0]; ++i) {
            int li = i, lj = j, lk = k;
            (a == 0 ? li : a == 1 ? lj : lk) -= 1;
            const bool lf = is_fluid(li, lj, lk);
            const bool rf = is_fluid(i, j, k);
            if (!lf && !rf) continue;
            if (is_solid(li, lj, lk) || is_solid(i, j, k)) continue;
            vel[g_.face_index(ax, i, j, k)] -= (q(i, j, k) - q(li, lj, lk)) * inv_dx;
          }
        }
      }
    }
    const double to_pa = params_.density / g_.pressure_dt;
    auto& p = g_.pressure();
    std::fill(p.begin(), p.end(), 0.0);
    for (std::size_t c : fluid_) p[c] = potential_[c] * to_pa;
  }

  MacGrid& g_;
  const SimParams& params_;
  std::vector<std::size_t> fluid_;
  std::vector<double> rhs_;
  std::vector<double> potential_;
  std::vector<double> scratch_;
  PoissonSystem sys_;
};

}  // namespace

MacGrid pressure_project(const MacGrid& grid, const SimParams& params, ProjectionStats* stats) {
  MacGrid out = grid;
  Projector projector(out, params);
  const ProjectionStats s = projector.run();
  if (stats != nullptr) *stats = s;
  return out;
}

}  // namespace liquidset
