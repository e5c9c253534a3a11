// Dephasing and collective-rotation noise for small registers.
//
// Conventions: a single qubit dephased for a time with strength gamma_t keeps
// its populations and has its coherence multiplied by exp(-gamma_t/2), i.e.
// Kraus set {sqrt(p) 1, sqrt(1-p) sz} with p = (1 + exp(-gamma_t/2))/2.
// Collective dephasing acts on a block through its total J_z: the coherence
// between eigenvalues m and n picks up exp(-gamma_t (m-n)^2 / 2), which is the
// average over Gaussian-distributed rotations exp(-i theta J_z).
#pragma once

#include "dfsmbqc/cluster.hpp"
#include "dfsmbqc/core.hpp"

namespace dfsmbqc {

enum class NoiseKind { kIndependentDephasing, kCollectiveDephasing, kCollectiveUnitary };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kIndependentDephasing;
  double gamma_t = 0.0;
  std::array<double, 3> beta{0.0, 0.0, 0.0};

  void validate() const {
    if (gamma_t < 0) throw std::invalid_argument("NoiseSpec: gamma_t must be nonnegative");
  }
};

// J_x, J_y, J_z = half the sum of the single-qubit Paulis over a block
struct CollectiveGenerators {
  Matrix jx, jy, jz;
};

inline CollectiveGenerators collective_generators(int block_qubits) {
  if (block_qubits < 2 || block_qubits > 3)
    throw std::invalid_argument("collective_generators: blocks of 2 or 3 qubits only");
  const std::size_t dim = std::size_t{1} << block_qubits;
  CollectiveGenerators g{Matrix::Zero(dim, dim), Matrix::Zero(dim, dim), Matrix::Zero(dim, dim)};
  for (int q = 0; q < block_qubits; ++q) {
    g.jx += 0.5 * embed_operator(gates::sigma_x(), {q}, block_qubits);
    g.jy += 0.5 * embed_operator(gates::sigma_y(), {q}, block_qubits);
    g.jz += 0.5 * embed_operator(gates::sigma_z(), {q}, block_qubits);
  }
  return g;
}

namespace detail {

// entrywise coherence scaling: rho(i,j) *= factor(local_i, local_j)
template <typename FactorFn>
Matrix scale_coherences(const Matrix& rho, const std::vector<int>& targets, int num_qubits,
                        FactorFn&& factor) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  Matrix out = rho;
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      std::size_t lr = 0, lc = 0;
      for (int t : targets) {
        lr = (lr << 1) | static_cast<unsigned>(bit_of(r, t, num_qubits));
        lc = (lc << 1) | static_cast<unsigned>(bit_of(c, t, num_qubits));
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *= factor(lr, lc);
    }
  return out;
}

}  // namespace detail

inline QuantumState apply_independent_dephasing(const QuantumState& state, int qubit,
                                                double gamma_t) {
  if (gamma_t < 0) throw std::invalid_argument("apply_independent_dephasing: negative gamma_t");
  detail::check_targets({qubit}, state.num_qubits(), "apply_independent_dephasing");
  if (gamma_t == 0) return state;
  const double d = std::exp(-gamma_t / 2.0);
  Matrix rho = detail::scale_coherences(state.density_matrix(), {qubit}, state.num_qubits(),
                                        [d](std::size_t a, std::size_t b) { return a == b ? 1.0 : d; });
  return QuantumState::mixed_unchecked(std::move(rho));
}

namespace detail {

// J_z eigenvalue of a two-qubit computational basis state
inline double pair_jz(std::size_t local) {
  static const double values[4] = {1.0, 0.0, 0.0, -1.0};
  return values[local];
}

}  // namespace detail

inline QuantumState apply_collective_dephasing(const QuantumState& state,
                                               std::pair<int, int> block, double gamma_t) {
  if (gamma_t < 0) throw std::invalid_argument("apply_collective_dephasing: negative gamma_t");
  detail::check_targets({block.first, block.second}, state.num_qubits(),
                        "apply_collective_dephasing");
  if (gamma_t == 0) return state;
  Matrix rho = detail::scale_coherences(
      state.density_matrix(), {block.first, block.second}, state.num_qubits(),
      [gamma_t](std::size_t a, std::size_t b) {
        const double dm = detail::pair_jz(a) - detail::pair_jz(b);
        return std::exp(-gamma_t * dm * dm / 2.0);
      });
  return QuantumState::mixed_unchecked(std::move(rho));
}

// exp(-i (bx Jx + by Jy + bz Jz)) on a block of 2 or 3 qubits
inline Matrix collective_unitary(int block_qubits, const std::array<double, 3>& beta) {
  const CollectiveGenerators g = collective_generators(block_qubits);
  const Matrix h = beta[0] * g.jx + beta[1] * g.jy + beta[2] * g.jz;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases[i] = std::exp(Complex(0, -es.eigenvalues()[i]));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline QuantumState apply_collective_unitary(const QuantumState& state,
                                             const std::vector<int>& block,
                                             const std::array<double, 3>& beta) {
  const Matrix u = collective_unitary(static_cast<int>(block.size()), beta);
  return apply_gate(state, u, block);
}

// one dephasing pass over a whole lattice: independent mode hits every
// physical qubit, collective mode hits each dual-rail pair through its J_z
inline QuantumState dephase_register(const QuantumState& state, const LatticeSpec& lattice,
                                     double gamma_t, NoiseKind mode) {
  lattice.validate();
  if (state.num_qubits() != lattice.physical_count())
    throw std::invalid_argument("dephase_register: state does not match lattice");
  QuantumState out = state;
  switch (mode) {
    case NoiseKind::kIndependentDephasing:
      for (int q = 0; q < lattice.physical_count(); ++q)
        out = apply_independent_dephasing(out, q, gamma_t);
      return out;
    case NoiseKind::kCollectiveDephasing:
      if (lattice.encoding != Encoding::kDualRail)
        throw std::invalid_argument("dephase_register: collective mode needs dual-rail pairs");
      for (int site = 0; site < lattice.effective_count; ++site) {
        const auto& block = lattice.physical(site);
        out = apply_collective_dephasing(out, {block[0], block[1]}, gamma_t);
      }
      return out;
    default:
      throw std::invalid_argument("dephase_register: unsupported mode");
  }
}

// Kraus forms, mainly for completeness/CP property checks ---------------------

inline std::vector<Matrix> independent_dephasing_kraus(double gamma_t) {
  const double p = (1.0 + std::exp(-gamma_t / 2.0)) / 2.0;
  return {std::sqrt(p) * gates::identity(), std::sqrt(1.0 - p) * gates::sigma_z()};
}

// Diagonal Kraus set for the pair channel, from the eigendecomposition of the
// (positive) Gram matrix F(a,b) = exp(-gamma_t (m_a - m_b)^2 / 2).
inline std::vector<Matrix> collective_dephasing_kraus(double gamma_t) {
  Matrix f(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double dm = detail::pair_jz(a) - detail::pair_jz(b);
      f(a, b) = std::exp(-gamma_t * dm * dm / 2.0);
    }
  Eigen::SelfAdjointEigenSolver<Matrix> es(f);
  std::vector<Matrix> kraus;
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double w = es.eigenvalues()[i];
    if (w < 1e-14) continue;
    Matrix k = Matrix::Zero(4, 4);
    for (int a = 0; a < 4; ++a) k(a, a) = std::sqrt(w) * es.eigenvectors()(a, i);
    kraus.push_back(std::move(k));
  }
  return kraus;
}

// Detector no-click window for N expected photons at effective efficiency
// eta: (lower, upper) = (exp(-(1 + eta/2) eta N), (1 + 2 eta/3) exp(-eta N)).
inline std::pair<double, double> no_click_probability_bounds(double eta, double n_photons) {
  if (eta < 0 || eta > 1)
    throw std::invalid_argument("no_click_probability_bounds: efficiency outside [0,1]");
  if (n_photons < 0)
    throw std::invalid_argument("no_click_probability_bounds: negative photon number");
  const double lower = std::exp(-(1.0 + eta / 2.0) * eta * n_photons);
  const double upper = (1.0 + 2.0 * eta / 3.0) * std::exp(-eta * n_photons);
  return {lower, upper};
}

}  // namespace dfsmbqc
