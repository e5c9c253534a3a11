// Dense statevector / density-matrix primitives for small qubit registers.
//
// Conventions used everywhere in this library:
//   * qubit 0 is the MOST significant bit of a basis-state index, so an
//     n-qubit register reads |q0 q1 ... q_{n-1}> and tensor(a, b) puts `a`
//     on the high bits;
//   * rz(theta) = diag(1, e^{i theta}), i.e. the |0> component is untouched;
//   * operations return new values, inputs are never mutated.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfsmbqc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Register cap: dense density matrices above this get out of hand.
inline constexpr int kMaxQubits = 12;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kProjectorTol = 1e-10;
inline constexpr double kForcedOutcomeTol = 1e-12;

namespace detail {

inline int qubits_for_dim(std::size_t dim, const char* who) {
  if (dim == 0) throw std::invalid_argument(std::string(who) + ": empty state");
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if ((std::size_t{1} << n) != dim)
    throw std::invalid_argument(std::string(who) + ": dimension is not a power of two");
  if (n > kMaxQubits)
    throw std::invalid_argument(std::string(who) + ": register exceeds " +
                                std::to_string(kMaxQubits) + " qubits");
  return n;
}

// qubit q occupies bit position (n-1-q) of a basis index
inline int bit_of(std::size_t index, int qubit, int num_qubits) {
  return static_cast<int>((index >> (num_qubits - 1 - qubit)) & 1u);
}

inline void check_targets(const std::vector<int>& targets, int num_qubits, const char* who) {
  if (targets.empty())
    throw std::invalid_argument(std::string(who) + ": no target qubits");
  for (int t : targets)
    if (t < 0 || t >= num_qubits)
      throw std::invalid_argument(std::string(who) + ": target qubit out of range");
  std::vector<int> sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument(std::string(who) + ": duplicate target qubit");
}

}  // namespace detail

inline bool is_hermitian(const Matrix& m, double tol = kHermTol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const Matrix& m, double tol = 1e-12) {
  Matrix gram = m.adjoint() * m;
  gram -= Matrix::Identity(m.cols(), m.cols());
  return gram.cwiseAbs().maxCoeff() <= tol;
}

// ----------------------------------------------------------------------------
// linear-operator kernels (public because tests and verification code want
// raw access; QuantumState wraps them with validation)

// apply `op` to the listed target qubits of an amplitude vector.  targets[0]
// is the most significant bit of op's own index space.  op need not be
// unitary (measurement code embeds projectors through the same kernel).
inline Vector apply_operator(const Vector& amps, const Matrix& op,
                             const std::vector<int>& targets, int num_qubits) {
  detail::check_targets(targets, num_qubits, "apply_operator");
  const int k = static_cast<int>(targets.size());
  const std::size_t local_dim = std::size_t{1} << k;
  if (op.rows() != static_cast<Eigen::Index>(local_dim) || op.cols() != op.rows())
    throw std::invalid_argument("apply_operator: operator dimension does not match target count");
  if (amps.size() != static_cast<Eigen::Index>(std::size_t{1} << num_qubits))
    throw std::invalid_argument("apply_operator: state dimension mismatch");

  std::vector<std::size_t> masks(k);
  for (int i = 0; i < k; ++i)
    masks[i] = std::size_t{1} << (num_qubits - 1 - targets[i]);

  Vector out = Vector::Zero(amps.size());
  const std::size_t dim = static_cast<std::size_t>(amps.size());
  for (std::size_t idx = 0; idx < dim; ++idx) {
    std::size_t local_out = 0;
    std::size_t base = idx;
    for (int i = 0; i < k; ++i) {
      local_out = (local_out << 1) | ((idx & masks[i]) ? 1u : 0u);
      base &= ~masks[i];
    }
    Complex acc = 0;
    for (std::size_t local_in = 0; local_in < local_dim; ++local_in) {
      const Complex g = op(static_cast<Eigen::Index>(local_out), static_cast<Eigen::Index>(local_in));
      if (g == Complex{0, 0}) continue;
      std::size_t src = base;
      for (int i = 0; i < k; ++i)
        if ((local_in >> (k - 1 - i)) & 1u) src |= masks[i];
      acc += g * amps[static_cast<Eigen::Index>(src)];
    }
    out[static_cast<Eigen::Index>(idx)] = acc;
  }
  return out;
}

// rho -> op rho op^dagger on the listed targets
inline Matrix apply_operator_sandwich(const Matrix& rho, const Matrix& op,
                                      const std::vector<int>& targets, int num_qubits) {
  const Eigen::Index dim = rho.rows();
  if (rho.cols() != dim)
    throw std::invalid_argument("apply_operator_sandwich: density matrix not square");
  Matrix left(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    left.col(c) = apply_operator(rho.col(c), op, targets, num_qubits);
  // (A op^dagger) rows are conj(op) applied to A's rows
  Matrix conj_op = op.conjugate();
  Matrix out(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    Vector row = left.row(r).transpose();
    out.row(r) = apply_operator(row, conj_op, targets, num_qubits).transpose();
  }
  return out;
}

// full 2^n x 2^n embedding of an operator (column-by-column application)
inline Matrix embed_operator(const Matrix& op, const std::vector<int>& targets, int num_qubits) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  Matrix full(dim, dim);
  Vector basis = Vector::Zero(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    basis[static_cast<Eigen::Index>(c)] = 1.0;
    full.col(static_cast<Eigen::Index>(c)) = apply_operator(basis, op, targets, num_qubits);
    basis[static_cast<Eigen::Index>(c)] = 0.0;
  }
  return full;
}

// ----------------------------------------------------------------------------
// QuantumState

class QuantumState {
 public:
  static QuantumState pure(Vector amplitudes) {
    const int n = detail::qubits_for_dim(static_cast<std::size_t>(amplitudes.size()), "QuantumState::pure");
    const double norm = amplitudes.norm();
    if (std::abs(norm - 1.0) > 1e-9)
      throw std::invalid_argument("QuantumState::pure: amplitudes not normalized");
    amplitudes /= norm;  // absorb harmless drift
    return QuantumState(n, std::move(amplitudes));
  }

  static QuantumState mixed(Matrix density) {
    if (density.rows() != density.cols())
      throw std::invalid_argument("QuantumState::mixed: density matrix not square");
    const int n = detail::qubits_for_dim(static_cast<std::size_t>(density.rows()), "QuantumState::mixed");
    if (!is_hermitian(density, 1e-10))
      throw std::invalid_argument("QuantumState::mixed: density matrix not Hermitian");
    if (std::abs(density.trace().real() - 1.0) > 1e-9 || std::abs(density.trace().imag()) > 1e-10)
      throw std::invalid_argument("QuantumState::mixed: trace is not one");
    Eigen::SelfAdjointEigenSolver<Matrix> es(density, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol)
      throw std::invalid_argument("QuantumState::mixed: density matrix not positive semidefinite");
    return QuantumState(n, std::move(density));
  }

  // trusted fast paths for internal use by operations that provably preserve
  // validity (unitaries, trace-preserving channels, renormalized projections)
  static QuantumState pure_unchecked(Vector amplitudes) {
    const int n = detail::qubits_for_dim(static_cast<std::size_t>(amplitudes.size()), "QuantumState::pure");
    return QuantumState(n, std::move(amplitudes));
  }
  static QuantumState mixed_unchecked(Matrix density) {
    const int n = detail::qubits_for_dim(static_cast<std::size_t>(density.rows()), "QuantumState::mixed");
    return QuantumState(n, std::move(density));
  }

  static QuantumState basis_state(int num_qubits, std::size_t index) {
    if (num_qubits < 1 || num_qubits > kMaxQubits)
      throw std::invalid_argument("QuantumState::basis_state: bad qubit count");
    const std::size_t dim = std::size_t{1} << num_qubits;
    if (index >= dim)
      throw std::invalid_argument("QuantumState::basis_state: index out of range");
    Vector v = Vector::Zero(dim);
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return QuantumState(num_qubits, std::move(v));
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return std::size_t{1} << num_qubits_; }
  bool is_pure() const { return amplitudes_.has_value(); }

  const Vector& amplitudes() const {
    if (!amplitudes_) throw std::logic_error("QuantumState: no amplitude form for a mixed state");
    return *amplitudes_;
  }

  // density matrix by value; materializes |psi><psi| for pure states
  Matrix density_matrix() const {
    if (amplitudes_) return (*amplitudes_) * amplitudes_->adjoint();
    return *density_;
  }

  QuantumState as_mixed() const {
    if (!amplitudes_) return *this;
    return QuantumState(num_qubits_, density_matrix());
  }

 private:
  QuantumState(int n, Vector v) : num_qubits_(n), amplitudes_(std::move(v)) {}
  QuantumState(int n, Matrix m) : num_qubits_(n), density_(std::move(m)) {}

  int num_qubits_;
  std::optional<Vector> amplitudes_;
  std::optional<Matrix> density_;
};

// ----------------------------------------------------------------------------
// gates and reference kets

namespace gates {

inline Matrix identity(int dim = 2) { return Matrix::Identity(dim, dim); }

inline Matrix sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix sigma_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline Matrix sigma_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Matrix hadamard() {
  Matrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

inline Matrix rz(double theta) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = std::exp(Complex(0, theta));
  return m;
}

// controlled-Z: |0><0| x 1 + |1><1| x sigma_z
inline Matrix cz() {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return m;
}

// single Pauli by index 0..3 = 1, X, Y, Z
inline Matrix pauli(int i) {
  switch (i) {
    case 0: return identity();
    case 1: return sigma_x();
    case 2: return sigma_y();
    case 3: return sigma_z();
    default: throw std::invalid_argument("gates::pauli: index out of range");
  }
}

}  // namespace gates

namespace states {

inline Vector ket0() {
  Vector v(2);
  v << 1, 0;
  return v;
}

inline Vector ket1() {
  Vector v(2);
  v << 0, 1;
  return v;
}

inline Vector plus() {
  Vector v(2);
  const double s = 1.0 / std::sqrt(2.0);
  v << s, s;
  return v;
}

inline Vector minus() {
  Vector v(2);
  const double s = 1.0 / std::sqrt(2.0);
  v << s, -s;
  return v;
}

inline Vector plus_y() {
  Vector v(2);
  const double s = 1.0 / std::sqrt(2.0);
  v << Complex(s, 0), Complex(0, s);
  return v;
}

// (|0> + sign e^{i alpha}|1>)/sqrt(2)
inline Vector equatorial(double alpha, int sign) {
  Vector v(2);
  const double s = 1.0 / std::sqrt(2.0);
  v << Complex(s, 0), static_cast<double>(sign) * s * std::exp(Complex(0, alpha));
  return v;
}

// (|01> - |10>)/sqrt(2)
inline Vector singlet() {
  Vector v = Vector::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  v[1] = s;
  v[2] = -s;
  return v;
}

// (|01> + sign e^{i alpha}|10>)/sqrt(2)
inline Vector pair_equatorial(double alpha, int sign) {
  Vector v = Vector::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  v[1] = s;
  v[2] = static_cast<double>(sign) * s * std::exp(Complex(0, alpha));
  return v;
}

}  // namespace states

// ----------------------------------------------------------------------------
// tensor products

inline Vector tensor(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

inline Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

inline QuantumState tensor(const QuantumState& a, const QuantumState& b) {
  if (a.is_pure() != b.is_pure())
    throw std::invalid_argument("tensor: cannot combine a pure state with a mixed one; promote explicitly");
  if (a.is_pure())
    return QuantumState::pure_unchecked(tensor(a.amplitudes(), b.amplitudes()));
  return QuantumState::mixed_unchecked(tensor(a.density_matrix(), b.density_matrix()));
}

// ----------------------------------------------------------------------------
// gate application, partial trace, measurement, fidelity

inline QuantumState apply_gate(const QuantumState& state, const Matrix& gate,
                               const std::vector<int>& targets) {
  if (state.is_pure())
    return QuantumState::pure_unchecked(apply_operator(state.amplitudes(), gate, targets, state.num_qubits()));
  return QuantumState::mixed_unchecked(
      apply_operator_sandwich(state.density_matrix(), gate, targets, state.num_qubits()));
}

// reduced state on `keep` (ascending register order), always mixed
inline QuantumState partial_trace(const QuantumState& state, const std::vector<int>& keep) {
  const int n = state.num_qubits();
  detail::check_targets(keep, n, "partial_trace");
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  const int k = static_cast<int>(kept.size());

  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

  const Matrix rho = state.density_matrix();
  const std::size_t kdim = std::size_t{1} << k;
  const std::size_t tdim = std::size_t{1} << traced.size();
  Matrix out = Matrix::Zero(kdim, kdim);

  auto global_index = [&](std::size_t kept_bits, std::size_t traced_bits) {
    std::size_t idx = 0;
    for (int i = 0; i < k; ++i)
      if ((kept_bits >> (k - 1 - i)) & 1u) idx |= std::size_t{1} << (n - 1 - kept[i]);
    for (std::size_t i = 0; i < traced.size(); ++i)
      if ((traced_bits >> (traced.size() - 1 - i)) & 1u) idx |= std::size_t{1} << (n - 1 - traced[i]);
    return idx;
  };

  for (std::size_t r = 0; r < kdim; ++r)
    for (std::size_t c = 0; c < kdim; ++c) {
      Complex acc = 0;
      for (std::size_t t = 0; t < tdim; ++t)
        acc += rho(static_cast<Eigen::Index>(global_index(r, t)),
                   static_cast<Eigen::Index>(global_index(c, t)));
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
    }
  return QuantumState::mixed_unchecked(std::move(out));
}

// how a measurement outcome gets picked: forced bit for deterministic replay,
// or sampled from the Born distribution with a caller-owned generator
class OutcomeRule {
 public:
  static OutcomeRule force(int outcome) {
    OutcomeRule r;
    r.forced_ = outcome;
    return r;
  }
  static OutcomeRule sample(std::mt19937_64& rng) {
    OutcomeRule r;
    r.rng_ = &rng;
    return r;
  }
  bool is_forced() const { return forced_.has_value(); }
  int forced_outcome() const { return *forced_; }
  std::mt19937_64& rng() const {
    if (!rng_) throw std::logic_error("OutcomeRule: no generator attached");
    return *rng_;
  }

 private:
  std::optional<int> forced_;
  std::mt19937_64* rng_ = nullptr;
};

struct MeasurementResult {
  int outcome = 0;
  double probability = 0;
  QuantumState state;
};

inline MeasurementResult projective_measure(const QuantumState& state,
                                            const std::vector<Matrix>& projectors,
                                            const std::vector<int>& targets,
                                            const OutcomeRule& rule) {
  if (projectors.empty())
    throw std::invalid_argument("projective_measure: no projectors");
  const std::size_t local_dim = std::size_t{1} << targets.size();
  Matrix sum = Matrix::Zero(local_dim, local_dim);
  for (const Matrix& p : projectors) {
    if (p.rows() != static_cast<Eigen::Index>(local_dim) || p.cols() != p.rows())
      throw std::invalid_argument("projective_measure: projector dimension mismatch");
    if (!is_hermitian(p, kProjectorTol) || (p * p - p).cwiseAbs().maxCoeff() > kProjectorTol)
      throw std::invalid_argument("projective_measure: operator is not a projector");
    sum += p;
  }
  if ((sum - Matrix::Identity(local_dim, local_dim)).cwiseAbs().maxCoeff() > kProjectorTol)
    throw std::invalid_argument("projective_measure: projectors are not complete");
  for (std::size_t i = 0; i < projectors.size(); ++i)
    for (std::size_t j = i + 1; j < projectors.size(); ++j)
      if ((projectors[i] * projectors[j]).cwiseAbs().maxCoeff() > kProjectorTol)
        throw std::invalid_argument("projective_measure: projectors are not orthogonal");

  const int n = state.num_qubits();
  std::vector<double> probs(projectors.size());
  std::vector<Vector> pure_branches;
  std::vector<Matrix> mixed_branches;
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    if (state.is_pure()) {
      Vector branch = apply_operator(state.amplitudes(), projectors[i], targets, n);
      probs[i] = branch.squaredNorm();
      pure_branches.push_back(std::move(branch));
    } else {
      Matrix branch = apply_operator_sandwich(state.density_matrix(), projectors[i], targets, n);
      probs[i] = branch.trace().real();
      mixed_branches.push_back(std::move(branch));
    }
  }

  int outcome;
  if (rule.is_forced()) {
    outcome = rule.forced_outcome();
    if (outcome < 0 || outcome >= static_cast<int>(projectors.size()))
      throw std::invalid_argument("projective_measure: forced outcome out of range");
    if (probs[outcome] < kForcedOutcomeTol)
      throw std::invalid_argument("projective_measure: forced outcome has vanishing probability");
  } else {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rule.rng());
    outcome = static_cast<int>(projectors.size()) - 1;
    double cum = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) {
        outcome = static_cast<int>(i);
        break;
      }
    }
  }

  const double p = probs[outcome];
  if (state.is_pure()) {
    Vector post = pure_branches[outcome] / std::sqrt(p);
    return {outcome, p, QuantumState::pure_unchecked(std::move(post))};
  }
  Matrix post = mixed_branches[outcome] / p;
  return {outcome, p, QuantumState::mixed_unchecked(std::move(post))};
}

namespace detail {

// Hermitian square root with clamped negatives
inline Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// Uhlmann fidelity, squared-overlap convention: F(|a>,|b>) = |<a|b>|^2
inline double fidelity(const QuantumState& a, const QuantumState& b) {
  if (a.num_qubits() != b.num_qubits())
    throw std::invalid_argument("fidelity: dimension mismatch");
  double f;
  if (a.is_pure() && b.is_pure()) {
    f = std::norm(a.amplitudes().dot(b.amplitudes()));
  } else if (a.is_pure()) {
    f = (a.amplitudes().adjoint() * b.density_matrix() * a.amplitudes())(0).real();
  } else if (b.is_pure()) {
    f = (b.amplitudes().adjoint() * a.density_matrix() * b.amplitudes())(0).real();
  } else {
    const Matrix sq = detail::psd_sqrt(a.density_matrix());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sq * b.density_matrix() * sq, Eigen::EigenvaluesOnly);
    const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    f = tr * tr;
  }
  // numeric overshoot beyond [0,1] is clamped, real violations are bugs
  if (f < -1e-9 || f > 1.0 + 1e-9)
    throw std::runtime_error("fidelity: value escaped [0,1]");
  return std::clamp(f, 0.0, 1.0);
}

inline double fidelity(const Matrix& rho, const Matrix& sigma) {
  return fidelity(QuantumState::mixed_unchecked(rho), QuantumState::mixed_unchecked(sigma));
}

// (tr rho sx, tr rho sy, tr rho sz) for a single qubit
inline std::array<double, 3> bloch_coordinates(const QuantumState& state) {
  if (state.num_qubits() != 1)
    throw std::invalid_argument("bloch_coordinates: single-qubit states only");
  const Matrix rho = state.density_matrix();
  return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

inline std::array<double, 3> bloch_coordinates(const Eigen::Matrix2cd& rho) {
  return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

}  // namespace dfsmbqc
