#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pilotwave/potential.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pilotwave {

/// Dense Hermitian matrix acting on amplitude vectors, row-major.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<cplx> entries;

  const cplx& operator()(std::size_t r, std::size_t c) const { return entries[r * n + c]; }
};

/// Hermitian operator defined by its action on a WaveFunction.
///
/// Kinds: position X, momentum P = -i hbar d/dx, velocity V = P/m,
/// Hamiltonian -(hbar^2/2m) d^2/dx^2 + V(x), real scalings and sums, plus
/// position-diagonal multiplication operators and dense matrices for small
/// toy grids. Cheap to copy; the expression tree is shared.
class LinearOperator {
 public:
  struct Position {};
  struct Momentum {};
  struct Velocity {};
  struct Hamiltonian {
    Potential potential;
  };
  struct Scaled;
  struct Sum;
  struct Multiplication {
    std::vector<double> values;
  };
  struct Dense {
    DenseMatrix matrix;
  };
  using Kind =
      std::variant<Position, Momentum, Velocity, Hamiltonian, Scaled, Sum, Multiplication, Dense>;

  static LinearOperator position();
  static LinearOperator momentum();
  static LinearOperator velocity();
  static LinearOperator hamiltonian(Potential potential);
  static LinearOperator scaled(double factor, LinearOperator op);
  static LinearOperator sum(LinearOperator lhs, LinearOperator rhs);
  static LinearOperator multiplication(std::vector<double> values, std::string label);
  /// Throws InvalidArgument unless the matrix is square and Hermitian.
  static LinearOperator dense(DenseMatrix matrix, std::string label);

  const Kind& kind() const;
  const std::string& label() const;

 private:
  struct Node;
  explicit LinearOperator(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static LinearOperator make(Kind kind, std::string label);

  std::shared_ptr<const Node> node_;
};

struct LinearOperator::Scaled {
  double factor;
  LinearOperator op;
};

struct LinearOperator::Sum {
  LinearOperator lhs;
  LinearOperator rhs;
};

LinearOperator operator+(LinearOperator lhs, LinearOperator rhs);
LinearOperator operator*(double factor, LinearOperator op);

/// Canonical form of an operator on a given grid: a multiplication in
/// position space, a multiplication in momentum space (symbol in FFT order),
/// and any dense remainder. Either diagonal part may be empty (zero).
struct OperatorDecomposition {
  std::vector<double> position_diagonal;
  std::vector<double> momentum_symbol;
  std::vector<std::pair<double, DenseMatrix>> dense_terms;

  bool has_position_part() const { return !position_diagonal.empty(); }
  bool has_momentum_part() const { return !momentum_symbol.empty(); }
  bool has_dense_part() const { return !dense_terms.empty(); }
};

OperatorDecomposition decompose(const LinearOperator& op, const SpatialGrid& grid,
                                const PhysicalConstants& constants);

/// Op|psi>. Throws GridMismatch when the operator carries tabulated data for
/// another grid size.
WaveFunction apply(const LinearOperator& op, const WaveFunction& psi,
                   const PhysicalConstants& constants);

/// Re <psi|Op psi>. The imaginary residue is returned through `imag_residue`
/// when provided.
double expectation(const LinearOperator& op, const WaveFunction& psi,
                   const PhysicalConstants& constants, double* imag_residue = nullptr);

/// Crude operator-norm bound used to scale Hermiticity tolerances.
double norm_estimate(const LinearOperator& op, const SpatialGrid& grid,
                     const PhysicalConstants& constants);

}  // namespace pilotwave
