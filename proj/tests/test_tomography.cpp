#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "dfsmbqc/mbqc.hpp"
#include "dfsmbqc/tomography.hpp"
#include "test_helpers.hpp"

using namespace dfsmbqc;
using Catch::Approx;
using testutil::check_close;

namespace {

ChannelFn identity_channel() {
  return [](const Eigen::Matrix2cd& rho) { return rho; };
}

ChannelFn full_dephasing() {
  return [](const Eigen::Matrix2cd& rho) {
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    out(0, 0) = rho(0, 0);
    out(1, 1) = rho(1, 1);
    return out;
  };
}

// direct sum K rho K' evaluation, bypassing channel_from_kraus
Eigen::Matrix2cd kraus_apply(const KrausSet& set, const Eigen::Matrix2cd& rho) {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (const auto& k : set.ops) out += k * rho * k.adjoint();
  return out;
}

Eigen::Matrix2cd outer(const Vector& a, const Vector& b) {
  return Eigen::Matrix2cd(a * b.adjoint());
}

}  // namespace

// ---------- probes ----------

TEST_CASE("probing the identity returns the probe states", "[tomography]") {
  const ProbeSet probes = probe_channel(identity_channel());
  check_close(Matrix(probes.e00), Matrix(outer(states::ket0(), states::ket0())), 1e-14);
  check_close(Matrix(probes.e11), Matrix(outer(states::ket1(), states::ket1())), 1e-14);
  check_close(Matrix(probes.eplus), Matrix(outer(states::plus(), states::plus())), 1e-14);
  check_close(Matrix(probes.eplus_y), Matrix(outer(states::plus_y(), states::plus_y())), 1e-14);
  CHECK(probes.max_trace_error < 1e-14);
}

TEST_CASE("probing full dephasing", "[tomography]") {
  const ProbeSet probes = probe_channel(full_dephasing());
  check_close(Matrix(probes.eplus), Matrix(Matrix::Identity(2, 2) / 2.0), 1e-14);
  check_close(Matrix(probes.e00), Matrix(outer(states::ket0(), states::ket0())), 1e-14);
}

TEST_CASE("trace loss is reported", "[tomography]") {
  const ChannelFn leaky = [](const Eigen::Matrix2cd& rho) {
    return Eigen::Matrix2cd(0.9 * rho);
  };
  const ProbeSet probes = probe_channel(leaky);
  CHECK(probes.max_trace_error == Approx(0.1).margin(1e-12));
}

TEST_CASE("probing the reference transfer kraus set matches direct evaluation", "[tomography]") {
  const KrausSet set = testutil::transfer_reference_kraus(0.5);
  const ProbeSet probes = probe_channel(channel_from_kraus(set));
  check_close(Matrix(probes.e00), Matrix(kraus_apply(set, outer(states::ket0(), states::ket0()))),
              1e-13);
  check_close(Matrix(probes.eplus),
              Matrix(kraus_apply(set, outer(states::plus(), states::plus()))), 1e-13);
}

// ---------- off-diagonal reconstruction ----------

TEST_CASE("off-diagonal identity on simple channels", "[tomography]") {
  const OffDiagonal id = reconstruct_offdiagonal(probe_channel(identity_channel()));
  check_close(Matrix(id.e01), Matrix(outer(states::ket0(), states::ket1())), 1e-13);
  check_close(Matrix(id.e10), Matrix(outer(states::ket1(), states::ket0())), 1e-13);

  const OffDiagonal deph = reconstruct_offdiagonal(probe_channel(full_dephasing()));
  CHECK(deph.e01.cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("off-diagonal reconstruction agrees with the kraus oracle", "[tomography]") {
  const KrausSet set = testutil::transfer_reference_kraus(1.0);
  const OffDiagonal off = reconstruct_offdiagonal(probe_channel(channel_from_kraus(set)));
  check_close(Matrix(off.e01), Matrix(kraus_apply(set, outer(states::ket0(), states::ket1()))),
              1e-12);
}

// ---------- beta tensor and chi ----------

TEST_CASE("beta tensor reproduces its defining expansion", "[tomography]") {
  const BetaTensor& beta = pauli_beta();
  auto unit = [](int j) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(j / 2, j % 2) = 1.0;
    return m;
  };
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int j = 0; j < 4; ++j) {
        const Eigen::Matrix2cd lhs =
            Eigen::Matrix2cd(gates::pauli(m) * unit(j) * gates::pauli(n).adjoint());
        Eigen::Matrix2cd rhs = Eigen::Matrix2cd::Zero();
        for (int k = 0; k < 4; ++k) rhs += beta.beta(m, n, j, k) * unit(k);
        check_close(Matrix(lhs), Matrix(rhs), 1e-12);
      }
}

TEST_CASE("chi of elementary channels", "[tomography]") {
  const ChiMatrix id = chi_of_channel(identity_channel());
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = 1.0;
  check_close(Matrix(id.values), expected, 1e-12);

  const ChiMatrix flip = chi_of_channel([](const Eigen::Matrix2cd& rho) {
    return Eigen::Matrix2cd(gates::sigma_x() * rho * gates::sigma_x());
  });
  expected.setZero();
  expected(1, 1) = 1.0;
  check_close(Matrix(flip.values), expected, 1e-12);
}

TEST_CASE("chi of the reference transfer channel is diagonal with the squared weights",
          "[tomography]") {
  const double tau = 0.5;
  const ChiMatrix chi =
      chi_of_channel(channel_from_kraus(testutil::transfer_reference_kraus(tau)));
  const double pre = std::exp(-3.0 * tau / 4.0);
  const double sh4 = std::sinh(tau / 4.0), ch4 = std::cosh(tau / 4.0), ch2 = std::cosh(tau / 2.0);

  CHECK(chi.values(0, 0).real() == Approx(pre * ch4 * ch2).margin(1e-10));
  CHECK(chi.values(1, 1).real() == Approx(pre * sh4 * ch2).margin(1e-10));
  CHECK(chi.values(2, 2).real() == Approx(pre * 2.0 * sh4 * sh4 * ch4).margin(1e-10));
  CHECK(chi.values(3, 3).real() == Approx(pre * 2.0 * ch4 * ch4 * sh4).margin(1e-10));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (r != c) CHECK(std::abs(chi.values(r, c)) < 1e-10);
}

TEST_CASE("simulated dephased chain has the same chi as the reference kraus channel",
          "[tomography]") {
  const double tau = 0.5;
  NoiseSpec noise;
  noise.kind = NoiseKind::kIndependentDephasing;
  noise.gamma_t = tau;
  const ChiMatrix simulated =
      chi_of_channel(transfer_chain_channel(ChainEncoding::kStandard, noise));
  const ChiMatrix reference =
      chi_of_channel(channel_from_kraus(testutil::transfer_reference_kraus(tau)));
  check_close(Matrix(simulated.values), Matrix(reference.values), 1e-9);
}

// ---------- kraus extraction ----------

TEST_CASE("kraus of the identity chi is the identity", "[tomography]") {
  ChiMatrix chi;
  chi.values.setZero();
  chi.values(0, 0) = 1.0;
  const KrausSet set = kraus_from_chi(chi);
  REQUIRE(set.ops.size() == 1);
  check_close(Matrix(set.ops[0]), Matrix(Matrix::Identity(2, 2)), 1e-12);
}

TEST_CASE("extracted kraus sets are complete", "[tomography]") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const KrausSet original = testutil::random_cptp(3, rng);
    const KrausSet extracted =
        kraus_from_chi(chi_of_channel(channel_from_kraus(original)));
    check_close(Matrix(extracted.completeness()), Matrix(Matrix::Identity(2, 2)), 1e-10);
  }
}

TEST_CASE("tomography round-trips random cptp channels", "[tomography]") {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const KrausSet original = testutil::random_cptp(2 + trial % 3, rng);
    const ChannelFn rebuilt =
        channel_from_kraus(kraus_from_chi(chi_of_channel(channel_from_kraus(original))));
    for (int probe = 0; probe < 5; ++probe) {
      const Eigen::Matrix2cd rho = testutil::random_qubit_density(rng);
      check_close(Matrix(rebuilt(rho)), Matrix(kraus_apply(original, rho)), 1e-8);
    }
  }
}

TEST_CASE("reconstructed chi of exact channels is hermitian and positive", "[tomography]") {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    const ChiMatrix chi =
        chi_of_channel(channel_from_kraus(testutil::random_cptp(3, rng)));
    CHECK(is_hermitian(Matrix(chi.values), 1e-8));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(chi.values);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
  }
}

TEST_CASE("clearly non-positive chi is rejected", "[tomography]") {
  ChiMatrix bad;
  bad.values.setZero();
  bad.values(0, 0) = 1.5;
  bad.values(1, 1) = -0.5;
  CHECK_THROWS_AS(kraus_from_chi(bad), std::invalid_argument);
}

// ---------- fidelities ----------

TEST_CASE("entanglement fidelity reference values", "[tomography]") {
  CHECK(entanglement_fidelity(identity_channel()) == Approx(1.0).margin(1e-12));
  CHECK(entanglement_fidelity(full_dephasing()) == Approx(0.5).margin(1e-12));

  // F_e of a unitary channel is |tr U / 2|^2
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix u = testutil::random_unitary(2, rng);
    const ChannelFn conj = [&u](const Eigen::Matrix2cd& rho) {
      return Eigen::Matrix2cd(u * rho * u.adjoint());
    };
    CHECK(entanglement_fidelity(conj) ==
          Approx(std::norm(u.trace() / 2.0)).margin(1e-12));
  }
}

TEST_CASE("the two entanglement fidelity paths agree", "[tomography]") {
  std::mt19937_64 rng(65);
  for (int trial = 0; trial < 10; ++trial) {
    const KrausSet set = testutil::random_cptp(3, rng);
    CHECK(entanglement_fidelity(set) ==
          Approx(entanglement_fidelity(channel_from_kraus(set))).margin(1e-11));
  }
}

TEST_CASE("reference transfer channel fidelity closed form", "[tomography]") {
  const double tau = 0.7;
  const double expected =
      std::exp(-3.0 * tau / 4.0) * std::cosh(tau / 4.0) * std::cosh(tau / 2.0);
  CHECK(entanglement_fidelity(channel_from_kraus(testutil::transfer_reference_kraus(tau))) ==
        Approx(expected).margin(1e-12));
}

TEST_CASE("average fidelity is the affine map of F_e", "[tomography]") {
  CHECK(average_fidelity(1.0) == Approx(1.0));
  CHECK(average_fidelity(0.25) == Approx(0.5));
  CHECK(average_fidelity(0.5) < average_fidelity(0.9));  // order preserving
  CHECK_THROWS_AS(average_fidelity(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(average_fidelity(1.1), std::invalid_argument);
}
