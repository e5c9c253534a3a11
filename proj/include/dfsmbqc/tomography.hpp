// Single-qubit process tomography in the fixed operator basis {1, sx, sy, sz}.
//
// The channel is probed exactly (no shot noise) on |0>, |1>, |+>, |+y>; the
// action on the off-diagonal matrix units follows from linearity:
//   E(|0><1|) = E(|+><+|) + i E(|+y><+y|) - (1+i)/2 [E(|0><0|) + E(|1><1|)].
// chi comes from solving the 16x16 linear system lambda = B chi built from
// K_m rho_j K_n^dag = sum_k beta^{mn}_{jk} rho_k over the matrix units, and
// Kraus operators from the eigendecomposition of the Hermitian chi.
#pragma once

#include <functional>

#include "dfsmbqc/core.hpp"

namespace dfsmbqc {

using ChannelFn = std::function<Eigen::Matrix2cd(const Eigen::Matrix2cd&)>;

inline constexpr double kChiHermitianTol = 1e-10;
inline constexpr double kChiNegativeEigTol = 1e-8;   // clamp window for CP noise
inline constexpr double kChiKeepEigTol = 1e-12;      // drop below this
inline constexpr double kBetaResidualTol = 1e-10;

struct ProbeSet {
  Eigen::Matrix2cd e00, e11, eplus, eplus_y;
  double max_trace_error = 0.0;
};

struct OffDiagonal {
  Eigen::Matrix2cd e01, e10;
};

struct ChiMatrix {
  Eigen::Matrix4cd values = Eigen::Matrix4cd::Zero();
};

struct KrausSet {
  std::vector<Eigen::Matrix2cd> ops;

  Eigen::Matrix2cd completeness() const {
    Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
    for (const auto& k : ops) sum += k.adjoint() * k;
    return sum;
  }
};

inline ChannelFn channel_from_kraus(KrausSet kraus) {
  return [ops = std::move(kraus.ops)](const Eigen::Matrix2cd& rho) {
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (const auto& k : ops) out += k * rho * k.adjoint();
    return out;
  };
}

inline ProbeSet probe_channel(const ChannelFn& channel) {
  auto density = [](const Vector& ket) {
    return Eigen::Matrix2cd(ket * ket.adjoint());
  };
  ProbeSet probes;
  probes.e00 = channel(density(states::ket0()));
  probes.e11 = channel(density(states::ket1()));
  probes.eplus = channel(density(states::plus()));
  probes.eplus_y = channel(density(states::plus_y()));
  for (const auto* m : {&probes.e00, &probes.e11, &probes.eplus, &probes.eplus_y})
    probes.max_trace_error =
        std::max(probes.max_trace_error, std::abs(m->trace() - Complex{1, 0}));
  return probes;
}

inline OffDiagonal reconstruct_offdiagonal(const ProbeSet& probes) {
  const Complex i{0, 1};
  OffDiagonal off;
  off.e01 = probes.eplus + i * probes.eplus_y - ((Complex{1, 0} + i) / 2.0) * (probes.e00 + probes.e11);
  off.e10 = off.e01.adjoint();  // Hermiticity-preserving channels only
  return off;
}

// beta^{mn}_{jk} flattened to a 16x16 system: row index j*4+k, column m*4+n.
// Built once from exact Pauli algebra on the matrix units rho_0..rho_3 =
// |0><0|, |0><1|, |1><0|, |1><1|.
struct BetaTensor {
  Eigen::Matrix<Complex, 16, 16> system;

  Complex beta(int m, int n, int j, int k) const { return system(j * 4 + k, m * 4 + n); }
};

inline const BetaTensor& pauli_beta() {
  static const BetaTensor tensor = [] {
    BetaTensor t;
    auto unit = [](int j) {
      Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
      u(j / 2, j % 2) = 1.0;
      return u;
    };
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n)
        for (int j = 0; j < 4; ++j) {
          const Eigen::Matrix2cd image =
              Eigen::Matrix2cd(gates::pauli(m)) * unit(j) * Eigen::Matrix2cd(gates::pauli(n)).adjoint();
          for (int k = 0; k < 4; ++k) t.system(j * 4 + k, m * 4 + n) = image(k / 2, k % 2);
        }
    return t;
  }();
  return tensor;
}

inline ChiMatrix chi_from_lambda(const ProbeSet& probes, const OffDiagonal& off) {
  const Eigen::Matrix2cd images[4] = {probes.e00, off.e01, off.e10, probes.e11};
  Eigen::Vector<Complex, 16> lambda;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) lambda(j * 4 + k) = images[j](k / 2, k % 2);

  const Eigen::Matrix<Complex, 16, 16>& b = pauli_beta().system;
  const Eigen::Vector<Complex, 16> chi_vec = b.fullPivLu().solve(lambda);
  const double residual = (b * chi_vec - lambda).cwiseAbs().maxCoeff();
  if (residual > kBetaResidualTol)
    throw std::runtime_error("chi_from_lambda: linear solve residual too large");

  ChiMatrix chi;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) chi.values(m, n) = chi_vec(m * 4 + n);
  if ((chi.values - chi.values.adjoint()).cwiseAbs().maxCoeff() > kChiHermitianTol)
    throw std::runtime_error("chi_from_lambda: chi has a non-Hermitian residue");
  return chi;
}

inline ChiMatrix chi_of_channel(const ChannelFn& channel) {
  const ProbeSet probes = probe_channel(channel);
  return chi_from_lambda(probes, reconstruct_offdiagonal(probes));
}

// K_i = sqrt(d_i) sum_j U_{ji} P_j from chi = U D U^dag.  Eigenvalues inside
// [-1e-8, 0) are treated as reconstruction noise and clamped; anything more
// negative means the map was not completely positive.
inline KrausSet kraus_from_chi(const ChiMatrix& chi) {
  if ((chi.values - chi.values.adjoint()).cwiseAbs().maxCoeff() > kChiHermitianTol)
    throw std::invalid_argument("kraus_from_chi: chi is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(chi.values);
  KrausSet out;
  for (int i = 0; i < 4; ++i) {
    double d = es.eigenvalues()[i];
    if (d < -kChiNegativeEigTol)
      throw std::invalid_argument("kraus_from_chi: chi has a negative eigenvalue; map is not CP");
    if (d < kChiKeepEigTol) continue;
    Eigen::Matrix2cd k = Eigen::Matrix2cd::Zero();
    for (int j = 0; j < 4; ++j) k += es.eigenvectors()(j, i) * Eigen::Matrix2cd(gates::pauli(j));
    out.ops.push_back(std::sqrt(d) * k);
  }
  return out;
}

// F_e = <b| (1 x E)(|b><b|) |b> for |b> = (|00> + |11>)/sqrt(2), evaluated as
// (1/4) sum_{ij} <i|E(|i><j|)|j> from the exact probes
inline double entanglement_fidelity(const ChannelFn& channel) {
  const ProbeSet probes = probe_channel(channel);
  const OffDiagonal off = reconstruct_offdiagonal(probes);
  const Complex value =
      probes.e00(0, 0) + off.e01(0, 1) + off.e10(1, 0) + probes.e11(1, 1);
  if (std::abs(value.imag()) > 1e-9)
    throw std::runtime_error("entanglement_fidelity: non-real value");
  return value.real() / 4.0;
}

inline double entanglement_fidelity(const KrausSet& kraus) {
  double f = 0;
  for (const auto& k : kraus.ops) f += std::norm(k.trace() / 2.0);
  return f;
}

// uniform-average state fidelity over pure inputs
inline double average_fidelity(double entanglement_fid) {
  if (entanglement_fid < -1e-9 || entanglement_fid > 1.0 + 1e-9)
    throw std::invalid_argument("average_fidelity: entanglement fidelity outside [0,1]");
  return (2.0 * entanglement_fid + 1.0) / 3.0;
}

}  // namespace dfsmbqc
