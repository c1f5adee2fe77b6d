#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pilotwave/bohm.hpp"
#include "pilotwave/cells.hpp"
#include "pilotwave/csv.hpp"
#include "pilotwave/errors.hpp"

namespace pilotwave {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

// Velocity fields at two bracketing snapshots, blended linearly in time.
class FieldInterpolator {
 public:
  FieldInterpolator(const VelocityField& a, const VelocityField& b)
      : a_(a), b_(b), grid_(a.grid) {}

  // Returns false when any contributing grid value is masked.
  bool evaluate(double x, double t, double& v) const {
    const double span = b_.time - a_.time;
    const double w = span > 0.0 ? std::clamp((t - a_.time) / span, 0.0, 1.0) : 0.0;
    std::size_t i0, i1;
    double f;
    locate(x, i0, i1, f);
    double va = 0.0, vb = 0.0;
    if (w < 1.0) {
      if (a_.node_mask[i0] || a_.node_mask[i1]) return false;
      va = (1.0 - f) * a_.values[i0] + f * a_.values[i1];
    }
    if (w > 0.0) {
      if (b_.node_mask[i0] || b_.node_mask[i1]) return false;
      vb = (1.0 - f) * b_.values[i0] + f * b_.values[i1];
    }
    v = (1.0 - w) * va + w * vb;
    return true;
  }

  // Largest admissible substep from the field around x (cells c-2 .. c+2).
  double step_bound(double x, double lipschitz_fraction, double cfl_fraction) const {
    std::size_t i0, i1;
    double f;
    locate(x, i0, i1, f);
    const std::size_t n = grid_.size();
    double lip = 0.0, vmax = 0.0;
    for (const VelocityField* field : {&a_, &b_}) {
      for (int d = -2; d <= 2; ++d) {
        const std::size_t p = (i0 + n + static_cast<std::size_t>(d + 2) - 2) % n;
        const std::size_t q = (p + 1) % n;
        if (!field->node_mask[p]) vmax = std::max(vmax, std::abs(field->values[p]));
        if (!field->node_mask[p] && !field->node_mask[q]) {
          lip = std::max(lip, std::abs(field->values[q] - field->values[p]) / grid_.dx());
        }
      }
    }
    double h = kNever;
    if (lip > 0.0) h = std::min(h, lipschitz_fraction / lip);
    if (vmax > 0.0) h = std::min(h, cfl_fraction * grid_.dx() / vmax);
    return h;
  }

 private:
  void locate(double x, std::size_t& i0, std::size_t& i1, double& f) const {
    const double s = (grid_.wrap(x) - grid_.x_min()) / grid_.dx();
    const double fl = std::floor(s);
    i0 = static_cast<std::size_t>(fl) % grid_.size();
    i1 = (i0 + 1) % grid_.size();
    f = s - fl;
  }

  const VelocityField& a_;
  const VelocityField& b_;
  const SpatialGrid& grid_;
};

}  // namespace

TrajectoryEnsemble::TrajectoryEnsemble(SpatialGrid grid, std::vector<double> times,
                                       std::size_t n_trajectories, std::uint64_t seed)
    : grid_(std::move(grid)),
      times_(std::move(times)),
      n_(n_trajectories),
      seed_(seed),
      positions_(n_trajectories * times_.size(), 0.0),
      freeze_time_(n_trajectories, kNever) {
  if (times_.empty()) throw InvalidArgument("trajectory ensemble needs at least one time");
}

std::vector<double> TrajectoryEnsemble::positions_at(std::size_t k) const {
  std::vector<double> x(n_);
  for (std::size_t j = 0; j < n_; ++j) x[j] = position(j, k);
  return x;
}

std::size_t TrajectoryEnsemble::frozen_count() const {
  std::size_t c = 0;
  for (std::size_t j = 0; j < n_; ++j) c += frozen(j) ? 1 : 0;
  return c;
}

std::size_t TrajectoryEnsemble::time_index(double t) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (std::abs(times_[k] - t) <= tol) return k;
  }
  throw TimeMismatch(times_.back(), t);
}

void TrajectoryEnsemble::freeze(std::size_t j, double t) {
  if (freeze_time_[j] != kNever) return;
  freeze_time_[j] = t;
  encounters_.push_back({j, t});
}

TrajectoryEnsemble integrate_trajectories(std::span<const double> x0s,
                                          std::span<const WaveFunction> snapshots,
                                          const PhysicalConstants& constants,
                                          const TrajectoryOptions& options) {
  if (snapshots.empty()) throw InvalidArgument("integrate_trajectories needs snapshots");
  const SpatialGrid& grid = snapshots.front().grid();
  std::vector<double> times(snapshots.size());
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    require_same_grid(grid, snapshots[k].grid(), "integrate_trajectories");
    times[k] = snapshots[k].time();
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw InvalidArgument("snapshots must be strictly time-ordered");
    }
  }

  std::vector<VelocityField> fields;
  fields.reserve(snapshots.size());
  for (const auto& s : snapshots) fields.push_back(velocity_field(s, constants, options.density_floor));

  const std::size_t n = x0s.size();
  TrajectoryEnsemble ens(grid, times, n, options.seed);
  std::vector<double> x(x0s.begin(), x0s.end());
  std::vector<std::uint8_t> live(n, 1);

  for (std::size_t j = 0; j < n; ++j) {
    x[j] = grid.wrap(x[j]);
    ens.set(j, 0, x[j]);
    double v0;
    if (!FieldInterpolator(fields[0], fields[0]).evaluate(x[j], times[0], v0)) {
      live[j] = 0;
      ens.freeze(j, times[0]);
    }
  }

  for (std::size_t k = 0; k + 1 < snapshots.size(); ++k) {
    const FieldInterpolator field(fields[k], fields[k + 1]);
    const double t_end = times[k + 1];
    const double min_step = options.min_step_fraction * (t_end - times[k]);
    double t = times[k];

    while (t < t_end) {
      double h = t_end - t;
      for (std::size_t j = 0; j < n; ++j) {
        if (!live[j]) continue;
        const double hj = field.step_bound(x[j], options.lipschitz_fraction, options.cfl_fraction);
        if (hj < min_step) {
          live[j] = 0;
          ens.freeze(j, t);
          continue;
        }
        h = std::min(h, hj);
      }
      const bool last = h >= t_end - t;
      if (last) h = t_end - t;

      for (std::size_t j = 0; j < n; ++j) {
        if (!live[j]) continue;
        double k1, k2, k3, k4;
        const bool ok = field.evaluate(x[j], t, k1) &&
                        field.evaluate(x[j] + 0.5 * h * k1, t + 0.5 * h, k2) &&
                        field.evaluate(x[j] + 0.5 * h * k2, t + 0.5 * h, k3) &&
                        field.evaluate(x[j] + h * k3, t + h, k4);
        if (!ok) {
          live[j] = 0;
          ens.freeze(j, t);
          continue;
        }
        x[j] += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
      }
      t = last ? t_end : t + h;
    }
    for (std::size_t j = 0; j < n; ++j) ens.set(j, k + 1, x[j]);
  }
  return ens;
}

std::size_t count_crossings(const TrajectoryEnsemble& ens) {
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < ens.size(); ++j) {
    if (!ens.frozen(j)) order.push_back(j);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ens.unwrapped(a, 0) < ens.unwrapped(b, 0);
  });
  std::size_t violations = 0;
  for (std::size_t p = 0; p + 1 < order.size(); ++p) {
    const std::size_t a = order[p], b = order[p + 1];
    const bool tied = ens.unwrapped(a, 0) == ens.unwrapped(b, 0);
    for (std::size_t k = 1; k < ens.times().size(); ++k) {
      const double xa = ens.unwrapped(a, k), xb = ens.unwrapped(b, k);
      if (tied ? xa != xb : !(xa < xb)) {
        ++violations;
        break;
      }
    }
  }
  return violations;
}

double equivariance_distance(const TrajectoryEnsemble& ens, const WaveFunction& psi_t,
                             std::size_t n_bins) {
  if (n_bins == 0) throw InvalidArgument("n_bins must be >= 1");
  require_same_grid(ens.grid(), psi_t.grid(), "equivariance_distance");
  const std::size_t k = ens.time_index(psi_t.time());
  const auto& grid = psi_t.grid();
  const double width = grid.length() / static_cast<double>(n_bins);

  auto rho = psi_t.density();
  const double total = std::accumulate(rho.begin(), rho.end(), 0.0);
  for (auto& r : rho) r /= total;
  const auto p = cells_to_bins(grid, rho, width);

  std::vector<double> hist(p.size(), 0.0);
  const double w = 1.0 / static_cast<double>(ens.size());
  for (std::size_t j = 0; j < ens.size(); ++j) hist[bin_of(grid, ens.position(j, k), width)] += w;

  double tv = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) tv += std::abs(hist[b] - p[b]);
  return std::min(1.0, 0.5 * tv);
}

void write_trajectories_csv(const TrajectoryEnsemble& ens, std::ostream& out) {
  out << "traj_id,t,x,frozen_flag\n";
  for (std::size_t j = 0; j < ens.size(); ++j) {
    for (std::size_t k = 0; k < ens.times().size(); ++k) {
      out << j << ',' << format_number(ens.times()[k]) << ',' << format_number(ens.position(j, k))
          << ',' << (ens.frozen_at(j, k) ? 1 : 0) << '\n';
    }
  }
}

}  // namespace pilotwave
