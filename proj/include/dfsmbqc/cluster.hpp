// Construction of encoded cluster states on dual-rail pairs.
//
// An effective qubit is a block of physical qubits: a dual-rail pair with
// codewords |0_E> = |01>, |1_E> = -|10>, or a three-qubit block for the
// exchange-free codec in dfs3.hpp.  Cluster edges are realized by a physical
// CZ between the top (first) qubits of the two blocks, which acts as a
// logical CZ on the code space.
#pragma once

#include <utility>

#include "dfsmbqc/core.hpp"

namespace dfsmbqc {

enum class Encoding { kDualRail, kDfs3 };

struct LatticeSpec {
  Encoding encoding = Encoding::kDualRail;
  int effective_count = 0;
  // effective qubit -> ordered physical indices; factories fill contiguous blocks
  std::vector<std::vector<int>> physical_map;
  // edges between effective qubits (top-layer adjacency)
  std::vector<std::pair<int, int>> edges;

  int block_size() const { return encoding == Encoding::kDualRail ? 2 : 3; }

  int physical_count() const {
    int count = 0;
    for (const auto& block : physical_map) count += static_cast<int>(block.size());
    return count;
  }

  const std::vector<int>& physical(int effective) const {
    if (effective < 0 || effective >= effective_count)
      throw std::invalid_argument("LatticeSpec: effective qubit out of range");
    return physical_map[effective];
  }

  int top_qubit(int effective) const { return physical(effective).front(); }

  std::vector<int> neighbors(int effective) const {
    std::vector<int> out;
    for (const auto& [a, b] : edges) {
      if (a == effective) out.push_back(b);
      if (b == effective) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  void validate() const {
    if (effective_count < 1)
      throw std::invalid_argument("LatticeSpec: need at least one effective qubit");
    if (static_cast<int>(physical_map.size()) != effective_count)
      throw std::invalid_argument("LatticeSpec: physical map size mismatch");
    std::vector<int> seen;
    for (const auto& block : physical_map) {
      if (static_cast<int>(block.size()) != block_size())
        throw std::invalid_argument("LatticeSpec: block size does not match encoding");
      for (int q : block) seen.push_back(q);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      throw std::invalid_argument("LatticeSpec: physical blocks overlap");
    if (seen.front() < 0 || seen.back() >= physical_count())
      throw std::invalid_argument("LatticeSpec: physical indices must be 0..count-1");
    if (physical_count() > kMaxQubits)
      throw std::invalid_argument("LatticeSpec: register exceeds the qubit cap");
    for (const auto& [a, b] : edges) {
      if (a < 0 || a >= effective_count || b < 0 || b >= effective_count)
        throw std::invalid_argument("LatticeSpec: edge endpoint out of range");
      if (a == b) throw std::invalid_argument("LatticeSpec: self-loop edge");
    }
  }

  static LatticeSpec chain(int n, Encoding enc = Encoding::kDualRail) {
    LatticeSpec lattice;
    lattice.encoding = enc;
    lattice.effective_count = n;
    const int bs = lattice.block_size();
    for (int i = 0; i < n; ++i) {
      std::vector<int> block;
      for (int j = 0; j < bs; ++j) block.push_back(i * bs + j);
      lattice.physical_map.push_back(std::move(block));
    }
    for (int i = 0; i + 1 < n; ++i) lattice.edges.emplace_back(i, i + 1);
    lattice.validate();
    return lattice;
  }

  static LatticeSpec grid(int rows, int cols, Encoding enc = Encoding::kDualRail) {
    LatticeSpec lattice = chain(rows * cols, enc);
    lattice.edges.clear();
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        const int site = r * cols + c;
        if (c + 1 < cols) lattice.edges.emplace_back(site, site + 1);
        if (r + 1 < rows) lattice.edges.emplace_back(site, site + cols);
      }
    lattice.validate();
    return lattice;
  }
};

// per-site stabilizer eigenvalues (-1)^kappa
struct EigenvalueSet {
  std::vector<int> kappa;
};

struct StabilizerOperator {
  int site = 0;
  Matrix op;  // full-register matrix
};

// mu |01> - nu |10>, the dual-rail image of mu|0_E> + nu|1_E>
inline Vector dual_rail_ket(Complex mu, Complex nu) {
  if (std::abs(std::norm(mu) + std::norm(nu) - 1.0) > 1e-9)
    throw std::invalid_argument("dual_rail_ket: amplitudes not normalized");
  Vector v = Vector::Zero(4);
  v[1] = mu;
  v[2] = -nu;
  return v;
}

// logical 2x2 block of a pair density matrix.  The trace of the result is the
// in-space weight; anything missing from 1 leaked out of span{|01>,|10>}.
inline Eigen::Matrix2cd decode_dual_rail(const Matrix& pair_rho) {
  if (pair_rho.rows() != 4 || pair_rho.cols() != 4)
    throw std::invalid_argument("decode_dual_rail: expected a two-qubit density matrix");
  Eigen::Matrix2cd logical;
  logical(0, 0) = pair_rho(1, 1);
  logical(0, 1) = -pair_rho(1, 2);  // |1_E> carries a minus sign on |10>
  logical(1, 0) = -pair_rho(2, 1);
  logical(1, 1) = pair_rho(2, 2);
  return logical;
}

// Entangling sweep along each block: CZ inside the pair, then H on the bottom
// qubit.  Takes each pair from |-,-> to the singlet (|01> - |10>)/sqrt(2),
// global phase included.
inline QuantumState build_singlet_column(const QuantumState& minus_pairs,
                                         const std::vector<std::pair<int, int>>& pairs) {
  QuantumState state = minus_pairs;
  for (const auto& [a, b] : pairs) {
    state = apply_gate(state, gates::cz(), {a, b});
    state = apply_gate(state, gates::hadamard(), {b});
  }
  return state;
}

inline QuantumState build_standard_cluster(int n, std::optional<std::pair<Complex, Complex>> input = {}) {
  if (n < 1) throw std::invalid_argument("build_standard_cluster: need at least one qubit");
  Vector site0 = states::plus();
  if (input) {
    site0[0] = input->first;
    site0[1] = input->second;
    if (std::abs(site0.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("build_standard_cluster: input state not normalized");
  }
  Vector amps = site0;
  for (int i = 1; i < n; ++i) amps = tensor(amps, states::plus());
  QuantumState state = QuantumState::pure(std::move(amps));
  for (int i = 0; i + 1 < n; ++i) state = apply_gate(state, gates::cz(), {i, i + 1});
  return state;
}

struct EncodedCluster {
  QuantumState state;
  EigenvalueSet kappa;
};

// Dual-rail cluster: every pair starts as a singlet column; an optional
// logical input replaces the first pair by mu|01> - nu|10> before the edge
// sweep.  Edges are CZs between top qubits.
inline EncodedCluster build_encoded_cluster(const LatticeSpec& lattice,
                                            std::optional<std::pair<Complex, Complex>> input = {}) {
  lattice.validate();
  if (lattice.encoding != Encoding::kDualRail)
    throw std::invalid_argument("build_encoded_cluster: only dual-rail lattices are supported");

  // pairs are still unentangled before the edge sweep, so assemble per pair
  Vector amps;
  for (int site = 0; site < lattice.effective_count; ++site) {
    Vector pair_state;
    if (site == 0 && input) {
      pair_state = dual_rail_ket(input->first, input->second);
    } else {
      QuantumState column = build_singlet_column(
          QuantumState::pure(tensor(states::minus(), states::minus())), {{0, 1}});
      pair_state = column.amplitudes();
    }
    amps = (site == 0) ? pair_state : tensor(amps, pair_state);
  }

  QuantumState state = QuantumState::pure(std::move(amps));
  for (const auto& [a, b] : lattice.edges)
    state = apply_gate(state, gates::cz(), {lattice.top_qubit(a), lattice.top_qubit(b)});

  EigenvalueSet kappa;
  kappa.kappa.assign(lattice.effective_count, 0);
  return {std::move(state), std::move(kappa)};
}

// correlation operator of one site: X_a' (x) prod_{c' in nghb} Z_c' with
// X = (sz sx) on both pair qubits and Z = sz on the neighbor's top qubit
inline StabilizerOperator stabilizer(const LatticeSpec& lattice, int site) {
  lattice.validate();
  if (lattice.encoding != Encoding::kDualRail)
    throw std::invalid_argument("stabilizer: defined for dual-rail lattices");
  const auto& block = lattice.physical(site);

  const Matrix zx = gates::sigma_z() * gates::sigma_x();
  std::vector<Matrix> factors(lattice.physical_count(), gates::identity());
  factors[block[0]] = zx;
  factors[block[1]] = zx;
  for (int c : lattice.neighbors(site)) factors[lattice.top_qubit(c)] *= gates::sigma_z();

  Matrix op = factors[0];
  for (int q = 1; q < lattice.physical_count(); ++q) op = tensor(op, factors[q]);
  return {site, std::move(op)};
}

// max over sites of || G |phi> - (-1)^kappa |phi> ||
inline double verify_stabilizers(const QuantumState& state, const LatticeSpec& lattice,
                                 const EigenvalueSet& kappa) {
  lattice.validate();
  if (!state.is_pure())
    throw std::invalid_argument("verify_stabilizers: pure states only");
  if (state.num_qubits() != lattice.physical_count())
    throw std::invalid_argument("verify_stabilizers: state does not match lattice");
  if (static_cast<int>(kappa.kappa.size()) != lattice.effective_count)
    throw std::invalid_argument("verify_stabilizers: eigenvalue list does not match lattice");

  double worst = 0;
  for (int site = 0; site < lattice.effective_count; ++site) {
    const StabilizerOperator g = stabilizer(lattice, site);
    const double sign = (kappa.kappa[site] % 2 == 0) ? 1.0 : -1.0;
    const Vector residual = g.op * state.amplitudes() - sign * state.amplitudes();
    worst = std::max(worst, residual.norm());
  }
  return worst;
}

}  // namespace dfsmbqc
