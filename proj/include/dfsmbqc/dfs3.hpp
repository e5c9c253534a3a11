// Three-qubit code protected against collective rotations exp(-i beta.J).
//
// The codewords live in the total-spin-1/2 sector of three spins, one in each
// multiplicity copy.  A collective rotation acts identically on the two
// copies: it moves the shared two-dimensional "gauge" factor (the m = +-1/2
// label) and leaves the copy label, which carries the logical qubit, alone.
// The decoder therefore pairs each codeword with its lowered partner,
// rotates the gauge onto the last qubit, and measures it; either branch
// returns the logical state on qubit 0 with no further correction.
#pragma once

#include <Eigen/QR>

#include <numbers>

#include "dfsmbqc/core.hpp"
#include "dfsmbqc/noise.hpp"

namespace dfsmbqc {

struct Dfs3Codewords {
  Vector zero;  // singlet(0,1) (x) |0>
  Vector one;   // orthogonal spin-1/2 state built on singlet(1,2)
};

inline Dfs3Codewords dfs3_codewords() {
  Dfs3Codewords cw{Vector::Zero(8), Vector::Zero(8)};
  const double s2 = 1.0 / std::sqrt(2.0);
  const double s6 = 1.0 / std::sqrt(6.0);
  cw.zero[4] = s2;   // |100>
  cw.zero[2] = -s2;  // |010>
  cw.one[1] = -2.0 * s6;  // |001>
  cw.one[2] = s6;         // |010>
  cw.one[4] = s6;         // |100>
  return cw;
}

// lowered partners: total-spin lowering operator applied to each codeword
// (coefficient 1 for j = 1/2, m = +1/2 -> m = -1/2)
inline Dfs3Codewords dfs3_lowered_codewords() {
  Dfs3Codewords cw{Vector::Zero(8), Vector::Zero(8)};
  const double s2 = 1.0 / std::sqrt(2.0);
  const double s6 = 1.0 / std::sqrt(6.0);
  cw.zero[5] = s2;   // |101>
  cw.zero[3] = -s2;  // |011>
  cw.one[3] = -s6;        // |011>
  cw.one[5] = -s6;        // |101>
  cw.one[6] = 2.0 * s6;   // |110>
  return cw;
}

// columns: |0_E>, |1_E>, lowered |0_E>, lowered |1_E>; spans the subspace left
// invariant by every collective rotation
inline Eigen::Matrix<Complex, 8, 4> dfs3_protected_sector() {
  const Dfs3Codewords up = dfs3_codewords();
  const Dfs3Codewords down = dfs3_lowered_codewords();
  Eigen::Matrix<Complex, 8, 4> v;
  v.col(0) = up.zero;
  v.col(1) = up.one;
  v.col(2) = down.zero;
  v.col(3) = down.one;
  return v;
}

// interferometer settings of the optical realization of the two stages,
// recorded as metadata; the codec itself is implemented as exact isometries
struct CircuitAngles {
  double phi;
  double theta1;
  double theta2;
};

inline CircuitAngles encode3_angles() {
  return {3.0 * std::numbers::pi / 4.0, -std::acos(std::sqrt(2.0 / 3.0)),
          -std::numbers::pi / 4.0};
}

inline CircuitAngles decode3_angles() {
  return {-3.0 * std::numbers::pi / 4.0, std::acos(std::sqrt(2.0 / 3.0)),
          std::numbers::pi / 4.0};
}

inline QuantumState encode3(Complex mu, Complex nu) {
  if (std::abs(std::norm(mu) + std::norm(nu) - 1.0) > 1e-9)
    throw std::invalid_argument("encode3: logical amplitudes not normalized");
  const Dfs3Codewords cw = dfs3_codewords();
  return QuantumState::pure(mu * cw.zero + nu * cw.one);
}

namespace detail {

// Decoder unitary: logical onto qubit 0, gauge onto qubit 2 as |+>/|->, and
// qubit 1 raised as a leakage flag for everything outside the protected
// sector (the completion basis comes from a QR factorization, any
// orthonormal choice works).
inline const Matrix& dfs3_decode_unitary() {
  static const Matrix w = [] {
    const Eigen::Matrix<Complex, 8, 4> sector = dfs3_protected_sector();
    Matrix targets(8, 4);
    Vector q0[2] = {states::ket0(), states::ket1()};
    Vector gauge[2] = {states::plus(), states::minus()};
    targets.col(0) = tensor(tensor(q0[0], states::ket0()), gauge[0]);
    targets.col(1) = tensor(tensor(q0[1], states::ket0()), gauge[0]);
    targets.col(2) = tensor(tensor(q0[0], states::ket0()), gauge[1]);
    targets.col(3) = tensor(tensor(q0[1], states::ket0()), gauge[1]);

    Matrix out = targets * sector.adjoint();

    // complete with the orthogonal complement mapped onto flag states
    Eigen::HouseholderQR<Matrix> qr{Matrix(sector)};
    const Matrix full_q = qr.householderQ() * Matrix::Identity(8, 8);
    const std::array<int, 4> flags{2, 3, 6, 7};  // qubit 1 set
    for (int k = 0; k < 4; ++k) {
      Vector flag = Vector::Zero(8);
      flag[flags[static_cast<std::size_t>(k)]] = 1.0;
      out += flag * full_q.col(4 + k).adjoint();
    }
    if (!is_unitary(out, 1e-10))
      throw std::logic_error("dfs3 decoder construction failed to be unitary");
    return out;
  }();
  return w;
}

}  // namespace detail

struct DecodeResult {
  Eigen::Matrix2cd logical = Eigen::Matrix2cd::Zero();
  int outcome = 0;  // measured bit of the gauge qubit
  double probability = 0.0;
};

// probabilities of the two gauge-qubit outcomes, for branch enumeration
inline std::array<double, 2> dfs3_branch_probabilities(const QuantumState& state) {
  if (state.num_qubits() != 3)
    throw std::invalid_argument("dfs3_branch_probabilities: expected a three-qubit state");
  const QuantumState rotated = apply_gate(state, detail::dfs3_decode_unitary(), {0, 1, 2});
  const Matrix gauge = partial_trace(rotated, {2}).density_matrix();
  return {gauge(0, 0).real(), gauge(1, 1).real()};
}

// Rotate into the decoded frame, measure the gauge qubit, trace the rest.
// Both outcomes occur with probability 1/2 on freshly encoded states and
// recover the logical qubit exactly; states that left the protected sector
// surface as infidelity.
inline DecodeResult decode3(const QuantumState& state, const OutcomeRule& rule) {
  if (state.num_qubits() != 3)
    throw std::invalid_argument("decode3: expected a three-qubit state");
  const QuantumState rotated = apply_gate(state, detail::dfs3_decode_unitary(), {0, 1, 2});

  const Vector k0 = states::ket0();
  const Vector k1 = states::ket1();
  const std::vector<Matrix> projectors{k0 * k0.adjoint(), k1 * k1.adjoint()};
  MeasurementResult r = projective_measure(rotated, projectors, {2}, rule);

  const QuantumState logical = partial_trace(r.state, {0});
  return {Eigen::Matrix2cd(logical.density_matrix()), r.outcome, r.probability};
}

// Worst-case infidelity of encode -> collective rotation -> decode over
// sampled rotation axes/angles and Haar-random logical states, enumerating
// every reachable measurement branch.
inline double verify_collective_invariance(int beta_samples, int state_samples,
                                           std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int b = 0; b < beta_samples; ++b) {
    const std::array<double, 3> beta{angle(rng), angle(rng), angle(rng)};
    const Matrix u = collective_unitary(3, beta);
    for (int s = 0; s < state_samples; ++s) {
      Eigen::Vector2cd logical{Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng))};
      logical.normalize();
      const QuantumState encoded = encode3(logical[0], logical[1]);
      const QuantumState noisy = apply_gate(encoded, u, {0, 1, 2});
      const QuantumState target = QuantumState::pure_unchecked(Vector(logical));
      const std::array<double, 2> probs = dfs3_branch_probabilities(noisy);
      for (int branch = 0; branch < 2; ++branch) {
        if (probs[static_cast<std::size_t>(branch)] < 1e-9) continue;  // rotation emptied it
        const DecodeResult probe = decode3(noisy, OutcomeRule::force(branch));
        const double f =
            fidelity(target, QuantumState::mixed_unchecked(Matrix(probe.logical)));
        worst = std::max(worst, 1.0 - f);
      }
    }
  }
  return worst;
}

// negative control: a bit flip on one physical qubit is not collective and
// must break the recovery; returns the largest observed infidelity
inline double local_noise_control_infidelity(int state_samples, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < state_samples; ++s) {
    Eigen::Vector2cd logical{Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng))};
    logical.normalize();
    const QuantumState encoded = encode3(logical[0], logical[1]);
    const QuantumState noisy = apply_gate(encoded, gates::sigma_x(), {0});
    const QuantumState target = QuantumState::pure_unchecked(Vector(logical));
    const std::array<double, 2> probs = dfs3_branch_probabilities(noisy);
    double recovered = 0.0;
    for (int branch = 0; branch < 2; ++branch) {
      if (probs[static_cast<std::size_t>(branch)] < 1e-9) continue;
      const DecodeResult r = decode3(noisy, OutcomeRule::force(branch));
      recovered += r.probability *
                   fidelity(target, QuantumState::mixed_unchecked(Matrix(r.logical)));
    }
    worst = std::max(worst, 1.0 - recovered);
  }
  return worst;
}

}  // namespace dfsmbqc
