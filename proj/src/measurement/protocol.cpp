#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pilotwave/cells.hpp"
#include "pilotwave/csv.hpp"
#include "pilotwave/errors.hpp"
#include "pilotwave/measurement.hpp"
#include "pilotwave/weak.hpp"

namespace pilotwave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> ratio(const std::vector<double>& num, const std::vector<double>& den) {
  std::vector<double> r(num.size());
  for (std::size_t b = 0; b < r.size(); ++b) r[b] = den[b] > 0.0 ? num[b] / den[b] : kNaN;
  return r;
}

}  // namespace

void ProtocolConfig::validate(const SpatialGrid& sys_grid) const {
  std::vector<std::string> v;
  if (!(coupling_g > 0.0 && std::isfinite(coupling_g))) v.push_back("coupling_g must be > 0");
  if (n_runs < 1) v.push_back("n_runs must be >= 1");
  if (!(f_bin_width >= sys_grid.dx() * (1.0 - 1e-12))) {
    v.push_back("f_bin_width must be >= the system grid spacing");
  }
  if (!(density_floor > 0.0 && density_floor <= 1e-3)) v.push_back("density_floor must lie in (0, 1e-3]");
  if (!v.empty()) throw ValidationError(std::move(v));
}

const ProtocolBin& ProtocolOutcome::peak_bin() const {
  return *std::max_element(bins.begin(), bins.end(),
                           [](const ProtocolBin& a, const ProtocolBin& b) { return a.mass < b.mass; });
}

ProtocolOutcome run_protocol(const WaveFunction& psi, const LinearOperator& op,
                             const Pointer& pointer, const ProtocolConfig& config,
                             const PhysicalConstants& constants) {
  const auto& grid = psi.grid();
  config.validate(grid);
  const double g = config.coupling_g;
  const double w = config.f_bin_width;

  const auto joint = impulsive_couple(prepare_joint(psi, pointer), op, g, constants);
  const JointSampler sampler(joint);

  // reference values from the cell model, deposited into the same bins
  const auto local = local_expectation(op, psi, constants, config.density_floor);
  const double norm = psi.norm_squared();
  std::vector<double> rho(grid.size()), rho_live(grid.size()), rho_s(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rho[i] = std::norm(psi[i]) * grid.dx() / norm;
    const bool live = std::isfinite(local.values[i]);
    rho_live[i] = live ? rho[i] : 0.0;
    rho_s[i] = live ? rho[i] * local.values[i] : 0.0;
  }
  const auto mass = cells_to_bins(grid, rho, w);
  const auto exact = ratio(cells_to_bins(grid, rho_s, w), cells_to_bins(grid, rho_live, w));

  std::vector<double> cell_p(grid.size(), 0.0), cell_y(grid.size(), 0.0);
  const auto& ptr = joint.ptr_grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < ptr.size(); ++j) {
      const double p = std::norm(joint(i, j));
      cell_p[i] += p;
      cell_y[i] += p * ptr.x(j);
    }
  }
  auto expected = ratio(cells_to_bins(grid, cell_y, w), cells_to_bins(grid, cell_p, w));
  for (auto& e : expected) e /= g;

  const std::size_t nb = mass.size();
  std::vector<std::size_t> count(nb, 0);
  std::vector<double> sum(nb, 0.0), sum_sq(nb, 0.0);
  ProtocolOutcome out{g, w, config.n_runs, {}, {}};
  if (config.keep_pairs) out.pairs.reserve(config.n_runs);
  for (std::size_t r = 0; r < config.n_runs; ++r) {
    RandomStream stream(config.seed, r);
    const auto pair = sampler.sample(stream);
    const std::size_t b = bin_of(grid, pair.f, w);
    ++count[b];
    sum[b] += pair.o;
    sum_sq[b] += pair.o * pair.o;
    if (config.keep_pairs) out.pairs.push_back(pair);
  }

  const double peak = *std::max_element(mass.begin(), mass.end());
  out.bins.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    auto& bin = out.bins[b];
    bin.center = grid.x_min() + (static_cast<double>(b) + 0.5) * w;
    bin.count = count[b];
    bin.estimate = kNaN;
    bin.standard_error = kNaN;
    if (count[b] > 0) {
      const double n = static_cast<double>(count[b]);
      const double mean = sum[b] / n;
      bin.estimate = mean / g;
      if (count[b] > 1) {
        const double var = std::max(0.0, (sum_sq[b] - sum[b] * mean) / (n - 1.0));
        bin.standard_error = std::sqrt(var / n) / g;
      }
    }
    bin.exact_value = exact[b];
    bin.expected_estimate = expected[b];
    bin.mass = mass[b];
    bin.central = mass[b] >= 0.5 * peak;
  }
  return out;
}

void write_protocol_csv(const ProtocolOutcome& outcome, std::ostream& out) {
  out << "bin_center,count,estimate,stderr,exact_value,deviation\n";
  for (const auto& b : outcome.bins) {
    if (b.count == 0) continue;
    out << format_number(b.center) << ',' << b.count << ',' << format_number(b.estimate) << ','
        << format_number(b.standard_error) << ',' << format_number(b.exact_value) << ','
        << format_number(b.deviation()) << '\n';
  }
}

void write_pairs_csv(const ProtocolOutcome& outcome, std::ostream& out) {
  out << "run_id,o,f\n";
  for (std::size_t r = 0; r < outcome.pairs.size(); ++r) {
    out << r << ',' << format_number(outcome.pairs[r].o) << ',' << format_number(outcome.pairs[r].f)
        << '\n';
  }
}

std::vector<double> BiasScanReport::quadrature_ratios() const {
  std::vector<double> r;
  for (std::size_t n = 1; n < entries.size(); ++n) {
    r.push_back(std::abs(entries[n].quadrature_bias) / std::abs(entries[n - 1].quadrature_bias));
  }
  return r;
}

BiasScanReport bias_scan(const WaveFunction& psi, const LinearOperator& op, const Pointer& pointer,
                         std::span<const double> g_values, const ProtocolConfig& base,
                         const PhysicalConstants& constants) {
  if (g_values.empty()) throw InvalidArgument("bias_scan needs at least one g");
  for (std::size_t n = 1; n < g_values.size(); ++n) {
    if (!(g_values[n] < g_values[n - 1])) throw InvalidArgument("bias_scan g values must be descending");
  }
  BiasScanReport report;
  for (double g : g_values) {
    ProtocolConfig cfg = base;
    cfg.coupling_g = g;
    cfg.keep_pairs = false;
    const auto outcome = run_protocol(psi, op, pointer, cfg, constants);
    const auto& b = outcome.peak_bin();
    report.entries.push_back({g, b.expected_estimate - b.exact_value, b.deviation(),
                              b.standard_error, b.estimate, b.exact_value});
  }
  return report;
}

}  // namespace pilotwave
