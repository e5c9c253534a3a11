// Measurement-driven computation on the encoded clusters.
//
// A site measurement at angle alpha realizes sx^b H rz(-alpha) on the logical
// flow.  The exponent b is the outcome bit for a bare (unencoded) qubit and
// the flipped bit for a dual-rail pair: the pair basis is
// |psi^{+-alpha}> = (|01> +- e^{i alpha}|10>)/sqrt(2) and the encoded plus
// state is the singlet, i.e. the minus element.  Byproducts are tracked in a
// Pauli frame and never corrected mid-circuit; the transfer protocol keeps
// every measurement at alpha = 0, where pushing sx through H needs no angle
// adaptation.
#pragma once

#include <functional>

#include "dfsmbqc/cluster.hpp"
#include "dfsmbqc/noise.hpp"

namespace dfsmbqc {

struct MeasurementBasis {
  enum class Kind { kJointPair, kSingleEquatorial, kComputational };
  Kind kind = Kind::kJointPair;
  double alpha = 0.0;
};

// Accumulated sx^x sz^z byproduct, applied left of the ideal circuit.
// advanced(b) prepends a new site's sx^b and pushes the old frame through the
// site's H (sx <-> sz swap; exact for alpha = 0 measurement angles).
struct ByproductFrame {
  int x_power = 0;
  int z_power = 0;

  ByproductFrame advanced(int x_bit) const { return {(x_bit ^ z_power) & 1, x_power & 1}; }

  // sx^x sz^z as a matrix (global phase irrelevant for frame correction)
  Matrix unitary() const {
    Matrix u = gates::identity();
    if (z_power % 2) u = gates::sigma_z() * u;
    if (x_power % 2) u = gates::sigma_x() * u;
    return u;
  }
};

struct OutcomeEntry {
  int site = 0;
  std::string basis;
  int bit = 0;
};

inline constexpr int kLeakageOutcome = 2;

struct JointMeasureResult {
  int outcome = 0;  // 0, 1, or kLeakageOutcome
  bool leaked = false;
  double probability = 0;
  QuantumState state;
  ByproductFrame frame;
};

// measurement of one pair in {|psi^{+alpha}>, |psi^{-alpha}>} plus an explicit
// leakage outcome for weight outside the dual-rail span
inline JointMeasureResult measure_joint(const QuantumState& state, const LatticeSpec& lattice,
                                        int site, double alpha, const OutcomeRule& rule,
                                        ByproductFrame frame = {}) {
  if (lattice.encoding != Encoding::kDualRail)
    throw std::invalid_argument("measure_joint: dual-rail lattices only");
  const auto& block = lattice.physical(site);

  const Vector plus = states::pair_equatorial(alpha, +1);
  const Vector minus = states::pair_equatorial(alpha, -1);
  const Matrix p_plus = plus * plus.adjoint();
  const Matrix p_minus = minus * minus.adjoint();
  const Matrix p_leak = Matrix::Identity(4, 4) - p_plus - p_minus;

  MeasurementResult r =
      projective_measure(state, {p_plus, p_minus, p_leak}, {block[0], block[1]}, rule);
  JointMeasureResult out{r.outcome, r.outcome == kLeakageOutcome, r.probability,
                         std::move(r.state), frame};
  if (!out.leaked) out.frame = frame.advanced(out.outcome ^ 1);
  return out;
}

struct PairSinglesResult {
  int s1 = 0;
  int s2 = 0;
  double probability = 0;
  QuantumState state;
  ByproductFrame frame;
};

// the same logical step via two single-qubit measurements: top qubit in
// {|+alpha>, |-alpha>}, bottom qubit in {|+>, |->}; byproduct bit s1^s2^1
inline PairSinglesResult measure_pair_singles(const QuantumState& state,
                                              const LatticeSpec& lattice, int site, double alpha,
                                              const OutcomeRule& top_rule,
                                              const OutcomeRule& bottom_rule,
                                              ByproductFrame frame = {}) {
  if (lattice.encoding != Encoding::kDualRail)
    throw std::invalid_argument("measure_pair_singles: dual-rail lattices only");
  const auto& block = lattice.physical(site);

  auto equatorial_projectors = [](double angle) {
    const Vector p = states::equatorial(angle, +1);
    const Vector m = states::equatorial(angle, -1);
    return std::vector<Matrix>{p * p.adjoint(), m * m.adjoint()};
  };

  MeasurementResult top =
      projective_measure(state, equatorial_projectors(alpha), {block[0]}, top_rule);
  MeasurementResult bottom =
      projective_measure(top.state, equatorial_projectors(0.0), {block[1]}, bottom_rule);

  return {top.outcome, bottom.outcome, top.probability * bottom.probability,
          std::move(bottom.state), frame.advanced(top.outcome ^ bottom.outcome ^ 1)};
}

struct ComputationalPairResult {
  int b1 = 0;
  int b2 = 0;
  double probability = 0;
  QuantumState state;
  Matrix u_sigma;  // sx for equal bits, identity otherwise
  ByproductFrame frame;
};

// readout used by the two-site transfer demonstration: optional H on both pair
// qubits, then a computational measurement of each
inline ComputationalPairResult measure_computational_pair(const QuantumState& state,
                                                          const LatticeSpec& lattice, int site,
                                                          bool apply_hadamards,
                                                          const OutcomeRule& rule,
                                                          ByproductFrame frame = {}) {
  if (lattice.encoding != Encoding::kDualRail)
    throw std::invalid_argument("measure_computational_pair: dual-rail lattices only");
  const auto& block = lattice.physical(site);

  QuantumState work = state;
  if (apply_hadamards) {
    work = apply_gate(work, gates::hadamard(), {block[0]});
    work = apply_gate(work, gates::hadamard(), {block[1]});
  }

  std::vector<Matrix> projectors;
  for (int b = 0; b < 4; ++b) {
    Matrix p = Matrix::Zero(4, 4);
    p(b, b) = 1.0;
    projectors.push_back(std::move(p));
  }
  MeasurementResult r = projective_measure(work, projectors, {block[0], block[1]}, rule);

  const int b1 = r.outcome >> 1;
  const int b2 = r.outcome & 1;
  const int x_bit = (b1 ^ b2 ^ 1) & 1;
  return {b1,
          b2,
          r.probability,
          std::move(r.state),
          x_bit ? gates::sigma_x() : gates::identity(),
          frame.advanced(x_bit)};
}

// physical CZ between the top qubits of two blocks; acts as logical CZ
inline QuantumState apply_effective_cz(const QuantumState& state, const LatticeSpec& lattice,
                                       std::pair<int, int> edge) {
  if (edge.first == edge.second)
    throw std::invalid_argument("apply_effective_cz: need two distinct sites");
  return apply_gate(state, gates::cz(),
                    {lattice.top_qubit(edge.first), lattice.top_qubit(edge.second)});
}

// ----------------------------------------------------------------------------
// the three-site transfer protocol

enum class ChainEncoding { kStandard, kDfs };

struct TransferConfig {
  ChainEncoding encoding = ChainEncoding::kStandard;
  int chain_length = 3;
  double theta = 0.0;
  double phi = 0.0;
  NoiseSpec noise;
  bool forced_zero = true;  // false: sample outcomes with the seeded generator
  std::uint64_t seed = 1;
};

struct ExperimentRecord {
  std::vector<OutcomeEntry> outcomes;
  ByproductFrame byproduct;
  Eigen::Matrix2cd logical_output = Eigen::Matrix2cd::Zero();  // before frame correction
  double leakage_weight = 0.0;
  double fidelity_vs_ideal = 0.0;

  Eigen::Matrix2cd corrected_logical() const {
    const Eigen::Matrix2cd u = byproduct.unitary();
    return u * logical_output * u.adjoint();
  }

  std::array<double, 3> corrected_bloch() const { return bloch_coordinates(corrected_logical()); }
};

namespace detail {

inline QuantumState transfer_noise(const QuantumState& state, const LatticeSpec* lattice,
                                   const NoiseSpec& noise, ChainEncoding encoding) {
  noise.validate();
  if (noise.gamma_t == 0) return state;
  switch (noise.kind) {
    case NoiseKind::kIndependentDephasing: {
      QuantumState out = state;
      for (int q = 0; q < state.num_qubits(); ++q)
        out = apply_independent_dephasing(out, q, noise.gamma_t);
      return out;
    }
    case NoiseKind::kCollectiveDephasing:
      if (encoding != ChainEncoding::kDfs || lattice == nullptr)
        throw std::invalid_argument(
            "run_transfer_chain: collective dephasing needs the dual-rail chain");
      return dephase_register(state, *lattice, noise.gamma_t, NoiseKind::kCollectiveDephasing);
    default:
      throw std::invalid_argument("run_transfer_chain: unsupported noise kind");
  }
}

}  // namespace detail

// Core implementation with an explicit complex input mu|0> + nu|1>.  Prepares
// the chain, applies noise once, measures sites 0..n-2 at alpha = 0, and
// reports the raw logical state of the last site plus the Pauli frame.  The
// fidelity field compares the frame-corrected output to the ideal
// (identity-transfer) target.
inline ExperimentRecord run_transfer_chain_amplitudes(Complex mu, Complex nu,
                                                      const TransferConfig& config) {
  if (config.chain_length < 2)
    throw std::invalid_argument("run_transfer_chain: chain needs at least two sites");
  if (std::abs(std::norm(mu) + std::norm(nu) - 1.0) > 1e-9)
    throw std::invalid_argument("run_transfer_chain: input state not normalized");

  std::mt19937_64 rng(config.seed);
  auto rule = [&]() {
    return config.forced_zero ? OutcomeRule::force(0) : OutcomeRule::sample(rng);
  };

  ExperimentRecord record;
  ByproductFrame frame;

  if (config.encoding == ChainEncoding::kStandard) {
    QuantumState state = build_standard_cluster(config.chain_length, std::make_pair(mu, nu));
    state = detail::transfer_noise(state, nullptr, config.noise, config.encoding);

    const Vector plus = states::equatorial(0.0, +1);
    const Vector minus = states::equatorial(0.0, -1);
    const std::vector<Matrix> projectors{plus * plus.adjoint(), minus * minus.adjoint()};
    for (int site = 0; site + 1 < config.chain_length; ++site) {
      MeasurementResult r = projective_measure(state, projectors, {site}, rule());
      state = std::move(r.state);
      frame = frame.advanced(r.outcome);  // bare qubit: byproduct bit is the outcome itself
      record.outcomes.push_back({site, "B(0)", r.outcome});
    }
    const QuantumState reduced = partial_trace(state, {config.chain_length - 1});
    record.logical_output = Eigen::Matrix2cd(reduced.density_matrix());
    record.leakage_weight = 0.0;
  } else {
    const LatticeSpec lattice = LatticeSpec::chain(config.chain_length, Encoding::kDualRail);
    EncodedCluster cluster = build_encoded_cluster(lattice, std::make_pair(mu, nu));
    QuantumState state =
        detail::transfer_noise(cluster.state, &lattice, config.noise, config.encoding);

    for (int site = 0; site + 1 < config.chain_length; ++site) {
      JointMeasureResult r = measure_joint(state, lattice, site, 0.0, rule(), frame);
      if (r.leaked) throw std::runtime_error("run_transfer_chain: sampled a leakage outcome");
      state = std::move(r.state);
      frame = r.frame;
      record.outcomes.push_back({site, "B'(0)", r.outcome});
    }
    const auto& last = lattice.physical(lattice.effective_count - 1);
    const QuantumState pair = partial_trace(state, {last[0], last[1]});
    const Eigen::Matrix2cd logical = decode_dual_rail(pair.density_matrix());
    const double weight = logical.trace().real();
    if (weight < 1e-12)
      throw std::runtime_error("run_transfer_chain: output pair has no dual-rail weight");
    record.leakage_weight = 1.0 - weight;
    record.logical_output = logical / weight;
  }

  record.byproduct = frame;
  Vector ideal(2);
  ideal << mu, nu;
  record.fidelity_vs_ideal = fidelity(QuantumState::pure_unchecked(std::move(ideal)),
                                      QuantumState::mixed_unchecked(Matrix(record.corrected_logical())));
  return record;
}

inline ExperimentRecord run_transfer_chain(const TransferConfig& config) {
  const Complex mu{std::cos(config.theta), 0.0};
  const Complex nu = std::sin(config.theta) * std::exp(Complex(0, config.phi));
  return run_transfer_chain_amplitudes(mu, nu, config);
}

// Linear channel view of the transfer: eigendecompose the input and push each
// eigenvector through the chain.  Legitimate because the forced-zero branch
// probability is input-independent, so the conditioned map is linear.
inline std::function<Eigen::Matrix2cd(const Eigen::Matrix2cd&)> transfer_chain_channel(
    ChainEncoding encoding, const NoiseSpec& noise, int chain_length = 3) {
  return [encoding, noise, chain_length](const Eigen::Matrix2cd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho);
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i) {
      const double w = es.eigenvalues()[i];
      if (std::abs(w) < 1e-15) continue;
      TransferConfig config;
      config.encoding = encoding;
      config.chain_length = chain_length;
      config.noise = noise;
      const Eigen::Vector2cd v = es.eigenvectors().col(i);
      const ExperimentRecord record = run_transfer_chain_amplitudes(v[0], v[1], config);
      out += w * record.corrected_logical();
    }
    return out;
  };
}

// closed-form expectations for the two-site readout demonstration: the four
// outcome branches of the H (x) H computational measurement on pair 1 leave
// pair 2 in these states, up to the recorded byproduct
inline Vector transferred_pair_reference(Complex mu, Complex nu, int b1, int b2) {
  const double s = 1.0 / std::sqrt(2.0);
  Vector v = Vector::Zero(4);
  const Complex diff = mu - nu;
  const Complex sum = mu + nu;
  if (b1 == 0 && b2 == 0) {
    v[1] = s * diff;
    v[2] = -s * sum;
  } else if (b1 == 0 && b2 == 1) {
    v[1] = -s * sum;
    v[2] = s * diff;
  } else if (b1 == 1 && b2 == 0) {
    v[1] = s * sum;
    v[2] = -s * diff;
  } else {
    v[1] = -s * diff;
    v[2] = s * sum;
  }
  return v;
}

}  // namespace dfsmbqc
