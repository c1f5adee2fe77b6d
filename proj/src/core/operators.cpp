#include "pilotwave/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pilotwave/errors.hpp"

namespace pilotwave {

namespace {

std::string format_factor(double c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

void accumulate(std::vector<double>& target, std::span<const double> values, double factor) {
  if (target.empty()) {
    target.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) target[i] = factor * values[i];
    return;
  }
  for (std::size_t i = 0; i < values.size(); ++i) target[i] += factor * values[i];
}

void decompose_into(const LinearOperator& op, double factor, const SpatialGrid& grid,
                    const PhysicalConstants& c, OperatorDecomposition& out) {
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        const auto kvec = grid.wavenumbers();
        if constexpr (std::is_same_v<T, LinearOperator::Position>) {
          accumulate(out.position_diagonal, grid.coordinates(), factor);
        } else if constexpr (std::is_same_v<T, LinearOperator::Momentum>) {
          std::vector<double> s(kvec.size());
          for (std::size_t j = 0; j < s.size(); ++j) s[j] = c.hbar * kvec[j];
          accumulate(out.momentum_symbol, s, factor);
        } else if constexpr (std::is_same_v<T, LinearOperator::Velocity>) {
          std::vector<double> s(kvec.size());
          for (std::size_t j = 0; j < s.size(); ++j) s[j] = c.hbar * kvec[j] / c.mass;
          accumulate(out.momentum_symbol, s, factor);
        } else if constexpr (std::is_same_v<T, LinearOperator::Hamiltonian>) {
          std::vector<double> s(kvec.size());
          const double kin = c.hbar * c.hbar / (2.0 * c.mass);
          for (std::size_t j = 0; j < s.size(); ++j) s[j] = kin * kvec[j] * kvec[j];
          accumulate(out.momentum_symbol, s, factor);
          if (!k.potential.is_free()) {
            accumulate(out.position_diagonal, k.potential.tabulate(grid, c), factor);
          }
        } else if constexpr (std::is_same_v<T, LinearOperator::Scaled>) {
          decompose_into(k.op, factor * k.factor, grid, c, out);
        } else if constexpr (std::is_same_v<T, LinearOperator::Sum>) {
          decompose_into(k.lhs, factor, grid, c, out);
          decompose_into(k.rhs, factor, grid, c, out);
        } else if constexpr (std::is_same_v<T, LinearOperator::Multiplication>) {
          if (k.values.size() != grid.size()) {
            throw GridMismatch("multiplication operator '" + op.label() +
                               "' tabulated for another grid size");
          }
          accumulate(out.position_diagonal, k.values, factor);
        } else if constexpr (std::is_same_v<T, LinearOperator::Dense>) {
          if (k.matrix.n != grid.size()) {
            throw GridMismatch("dense operator '" + op.label() + "' has dimension " +
                               std::to_string(k.matrix.n) + " on a grid of " +
                               std::to_string(grid.size()));
          }
          out.dense_terms.emplace_back(factor, k.matrix);
        }
      },
      op.kind());
}

}  // namespace

struct LinearOperator::Node {
  Kind kind;
  std::string label;
};

const LinearOperator::Kind& LinearOperator::kind() const { return node_->kind; }
const std::string& LinearOperator::label() const { return node_->label; }

LinearOperator LinearOperator::make(Kind kind, std::string label) {
  return LinearOperator(std::make_shared<const Node>(Node{std::move(kind), std::move(label)}));
}

LinearOperator LinearOperator::position() { return make(Position{}, "X"); }
LinearOperator LinearOperator::momentum() { return make(Momentum{}, "P"); }
LinearOperator LinearOperator::velocity() { return make(Velocity{}, "V"); }

LinearOperator LinearOperator::hamiltonian(Potential potential) {
  std::string label = "H[" + potential.label() + "]";
  return make(Hamiltonian{std::move(potential)}, std::move(label));
}

LinearOperator LinearOperator::scaled(double factor, LinearOperator op) {
  if (!std::isfinite(factor)) throw InvalidArgument("operator scale must be finite");
  std::string label = format_factor(factor) + "*" + op.label();
  return make(Scaled{factor, std::move(op)}, std::move(label));
}

LinearOperator LinearOperator::sum(LinearOperator lhs, LinearOperator rhs) {
  std::string label = "(" + lhs.label() + " + " + rhs.label() + ")";
  return make(Sum{std::move(lhs), std::move(rhs)}, std::move(label));
}

LinearOperator LinearOperator::multiplication(std::vector<double> values, std::string label) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("multiplication operator has non-finite values");
  }
  return make(Multiplication{std::move(values)}, std::move(label));
}

LinearOperator LinearOperator::dense(DenseMatrix matrix, std::string label) {
  if (matrix.n == 0 || matrix.entries.size() != matrix.n * matrix.n) {
    throw InvalidArgument("dense operator must be a non-empty square matrix");
  }
  double scale = 0.0;
  for (const auto& e : matrix.entries) scale = std::max(scale, std::abs(e));
  for (std::size_t r = 0; r < matrix.n; ++r) {
    for (std::size_t c = r; c < matrix.n; ++c) {
      if (std::abs(matrix(r, c) - std::conj(matrix(c, r))) > 1e-12 * std::max(1.0, scale)) {
        throw InvalidArgument("dense operator '" + label + "' is not Hermitian");
      }
    }
  }
  return make(Dense{std::move(matrix)}, std::move(label));
}

LinearOperator operator+(LinearOperator lhs, LinearOperator rhs) {
  return LinearOperator::sum(std::move(lhs), std::move(rhs));
}

LinearOperator operator*(double factor, LinearOperator op) {
  return LinearOperator::scaled(factor, std::move(op));
}

OperatorDecomposition decompose(const LinearOperator& op, const SpatialGrid& grid,
                                const PhysicalConstants& constants) {
  constants.validate();
  OperatorDecomposition out;
  decompose_into(op, 1.0, grid, constants, out);
  return out;
}

WaveFunction apply(const LinearOperator& op, const WaveFunction& psi,
                   const PhysicalConstants& constants) {
  const auto parts = decompose(op, psi.grid(), constants);
  const auto amps = psi.amplitudes();
  const std::size_t n = amps.size();
  WaveFunction::Amplitudes out(n, cplx(0.0, 0.0));

  if (parts.has_position_part()) {
    for (std::size_t i = 0; i < n; ++i) out[i] = parts.position_diagonal[i] * amps[i];
  }
  if (parts.has_momentum_part()) {
    const auto t = spectral::apply_symbol(amps, parts.momentum_symbol);
    for (std::size_t i = 0; i < n; ++i) out[i] += t[i];
  }
  for (const auto& [factor, m] : parts.dense_terms) {
    for (std::size_t r = 0; r < n; ++r) {
      cplx acc(0.0, 0.0);
      for (std::size_t c = 0; c < n; ++c) acc += m(r, c) * amps[c];
      out[r] += factor * acc;
    }
  }
  return WaveFunction(psi.grid(), std::move(out), psi.time());
}

double expectation(const LinearOperator& op, const WaveFunction& psi,
                   const PhysicalConstants& constants, double* imag_residue) {
  const cplx v = inner_product(psi, apply(op, psi, constants));
  if (imag_residue != nullptr) *imag_residue = v.imag();
  return v.real();
}

double norm_estimate(const LinearOperator& op, const SpatialGrid& grid,
                     const PhysicalConstants& constants) {
  const auto parts = decompose(op, grid, constants);
  double est = 0.0;
  auto sup = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  est += sup(parts.position_diagonal) + sup(parts.momentum_symbol);
  for (const auto& [factor, m] : parts.dense_terms) {
    double fro = 0.0;
    for (const auto& e : m.entries) fro += std::norm(e);
    est += std::abs(factor) * std::sqrt(fro);
  }
  return est;
}

}  // namespace pilotwave
