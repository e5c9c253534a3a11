// dfs-mbqc: drive the simulator from the command line.
//
//   dfs-mbqc <command> --config <path> --out <path> [--seed N]
//
// commands:
//   transfer          one measurement-driven state transfer, JSON result
//   bloch-sweep       (theta, phi) grid over dephasing strengths, NDJSON rows
//   tomography        chi matrix / Kraus extraction for a named channel
//   stabilizer-check  cluster correlation-operator residuals
//   dfs3-check        three-qubit code: round trip, collective invariance, control
//   checks            all of the above suites plus the readout-table enumeration
//
// exit codes: 0 ok, 1 bad config or I/O, 2 a check suite failed
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dfsmbqc/dfsmbqc.hpp"

namespace {

using namespace dfsmbqc;

constexpr double kPi = 3.14159265358979323846;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// emitted fidelities and probabilities must stay inside [0,1]; anything
// further out than rounding noise is a bug, not data
double checked_unit(double x, const char* what) {
  if (x < -1e-12 || x > 1.0 + 1e-12)
    throw std::logic_error(std::string(what) + " outside [0,1]: " + sci(x));
  return std::clamp(x, 0.0, 1.0);
}

// index-sharded worker pool; results land in caller-owned slots so output
// order never depends on scheduling
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::max<unsigned>(
      1, std::min<std::size_t>(std::thread::hardware_concurrency(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

NoiseSpec natural_noise(ChainEncoding encoding, double gamma_t) {
  NoiseSpec noise;
  noise.kind = encoding == ChainEncoding::kStandard ? NoiseKind::kIndependentDephasing
                                                    : NoiseKind::kCollectiveDephasing;
  noise.gamma_t = gamma_t;
  return noise;
}

// --- check suites ------------------------------------------------------------

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

void stabilizer_suite(std::vector<CheckLine>& lines, bool kappa_flip) {
  auto run_one = [&](const LatticeSpec& lattice, const std::string& label) {
    const EncodedCluster cluster = build_encoded_cluster(lattice);
    const double residual = verify_stabilizers(cluster.state, lattice, cluster.kappa);
    lines.push_back({"stabilizers " + label, residual < 1e-10, "max residual " + sci(residual)});
  };
  run_one(LatticeSpec::chain(2), "chain-2");
  run_one(LatticeSpec::chain(3), "chain-3");
  run_one(LatticeSpec::chain(4), "chain-4");
  run_one(LatticeSpec::grid(2, 2), "grid-2x2");

  if (kappa_flip) {
    // designed failure: flipping one recorded eigenvalue must surface as a
    // residual of exactly 2 (the state is an eigenvector of the other sign)
    EncodedCluster cluster = build_encoded_cluster(LatticeSpec::chain(3));
    cluster.kappa.kappa[1] ^= 1;
    const double residual =
        verify_stabilizers(cluster.state, LatticeSpec::chain(3), cluster.kappa);
    lines.push_back(
        {"stabilizers kappa-flip fixture", false, "injected failure, residual " + sci(residual)});
  }
}

void dfs3_suite(std::vector<CheckLine>& lines, int beta_samples, int state_samples,
                int control_samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);

  const Complex mu{std::cos(0.7), 0.0};
  const Complex nu = std::sin(0.7) * std::exp(Complex(0, 0.4));
  Vector ideal(2);
  ideal << mu, nu;
  const QuantumState target = QuantumState::pure_unchecked(std::move(ideal));
  const QuantumState encoded = encode3(mu, nu);
  for (int branch = 0; branch < 2; ++branch) {
    const DecodeResult decoded = decode3(encoded, OutcomeRule::force(branch));
    const double f =
        fidelity(target, QuantumState::mixed_unchecked(Matrix(decoded.logical)));
    const bool ok = std::abs(decoded.probability - 0.5) < 1e-9 && f > 1.0 - 1e-9;
    lines.push_back({"dfs3 round-trip branch " + std::to_string(branch), ok,
                     "p=" + sci(decoded.probability) + " fidelity=" + sci(f)});
  }

  const double invariance = verify_collective_invariance(beta_samples, state_samples, rng);
  lines.push_back({"dfs3 collective invariance", invariance < 1e-9,
                   "worst infidelity " + sci(invariance)});

  // negative control: a local flip is *supposed* to get through, otherwise
  // the invariance check above proves nothing
  const double control = local_noise_control_infidelity(control_samples, rng);
  lines.push_back({"dfs3 local-noise control (must stay visible)", control > 1e-3,
                   "worst infidelity " + sci(control)});
}

void readout_table_suite(std::vector<CheckLine>& lines) {
  const LatticeSpec lattice = LatticeSpec::chain(2, Encoding::kDualRail);
  double worst_state = 0;
  double worst_prob = 0;
  bool pattern_ok = true;

  const std::pair<double, double> angles[] = {{0.3, 0.0}, {0.7, 1.1}, {1.2, 4.0}};
  for (const auto& [theta, phi] : angles) {
    const Complex mu{std::cos(theta), 0.0};
    const Complex nu = std::sin(theta) * std::exp(Complex(0, phi));
    for (int b = 0; b < 4; ++b) {
      const EncodedCluster cluster = build_encoded_cluster(lattice, std::make_pair(mu, nu));
      const ComputationalPairResult r =
          measure_computational_pair(cluster.state, lattice, 0, true, OutcomeRule::force(b));
      const QuantumState pair = partial_trace(r.state, {2, 3});
      const Vector ref = transferred_pair_reference(mu, nu, b >> 1, b & 1);
      const double overlap = std::real(ref.dot(pair.density_matrix() * ref));
      worst_state = std::max(worst_state, std::abs(1.0 - overlap));
      worst_prob = std::max(worst_prob, std::abs(r.probability - 0.25));
      const Matrix expected = ((b >> 1) == (b & 1)) ? gates::sigma_x() : gates::identity();
      if ((r.u_sigma - expected).norm() > 1e-12) pattern_ok = false;
    }
  }
  lines.push_back({"readout-table enumeration", worst_state < 1e-10 && pattern_ok,
                   "max state error " + sci(worst_state) + ", max prob error " + sci(worst_prob) +
                       (pattern_ok ? ", byproduct pattern ok" : ", byproduct pattern WRONG")});
}

int report(const std::vector<CheckLine>& lines, const std::string& out_path) {
  int failures = 0;
  for (const auto& line : lines) {
    if (!line.pass) ++failures;
    std::cout << (line.pass ? "[PASS] " : "[FAIL] ") << line.name << ": " << line.detail << "\n";
  }
  std::cout << (failures == 0 ? "all checks passed"
                              : std::to_string(failures) + " check(s) failed")
            << " (" << lines.size() << " total)\n";
  if (!out_path.empty()) {
    Json doc;
    Json checks = Json::array();
    for (const auto& line : lines) {
      Json entry;
      entry["name"] = line.name;
      entry["pass"] = line.pass;
      entry["detail"] = line.detail;
      checks.push_back(std::move(entry));
    }
    doc["checks"] = std::move(checks);
    doc["passed"] = failures == 0;
    write_text(out_path, doc.dump(2) + "\n");
  }
  return failures == 0 ? 0 : 2;
}

// --- commands ------------------------------------------------------------------

int cmd_transfer(const Json& cfg, const std::string& out_path,
                 std::optional<std::uint64_t> seed) {
  TransferConfig config = transfer_config_from_json(cfg);
  if (seed) config.seed = *seed;
  const ExperimentRecord record = run_transfer_chain(config);
  checked_unit(record.fidelity_vs_ideal, "fidelity_vs_ideal");
  checked_unit(record.leakage_weight, "leakage_weight");

  Json doc;
  doc["config"] = to_json(config);
  doc["result"] = to_json(record);
  write_text(out_path, doc.dump(2) + "\n");
  return 0;
}

int cmd_bloch_sweep(const Json& cfg, const std::string& out_path,
                    std::optional<std::uint64_t> seed) {
  std::vector<double> gammas = cfg.value("gamma_t", std::vector<double>{0.15, 0.5, 1.0, 5.0});
  const int theta_steps = cfg.value("theta_steps", 7);
  const int phi_steps = cfg.value("phi_steps", 12);
  const int chain = cfg.value("chain", 3);
  const std::uint64_t config_seed = seed ? *seed : cfg.value("seed", std::uint64_t{1});

  std::vector<ChainEncoding> encodings;
  for (const auto& name : cfg.value("encodings", std::vector<std::string>{"standard", "dfs"})) {
    if (name == "standard")
      encodings.push_back(ChainEncoding::kStandard);
    else if (name == "dfs")
      encodings.push_back(ChainEncoding::kDfs);
    else
      throw std::invalid_argument("unknown encoding in sweep config: " + name);
  }
  if (gammas.empty() || encodings.empty())
    throw std::invalid_argument("bloch-sweep: gamma_t list and encodings must be non-empty");
  for (double g : gammas)
    if (!(g >= 0)) throw std::invalid_argument("bloch-sweep: gamma_t must be >= 0");
  if (theta_steps < 2 || phi_steps < 1)
    throw std::invalid_argument("bloch-sweep: need theta_steps >= 2 and phi_steps >= 1");

  // one average-fidelity number per (encoding, gamma) cell, stamped onto rows
  std::vector<double> cell_avg(encodings.size() * gammas.size());
  for (std::size_t e = 0; e < encodings.size(); ++e)
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      const ChannelFn channel =
          transfer_chain_channel(encodings[e], natural_noise(encodings[e], gammas[g]), chain);
      cell_avg[e * gammas.size() + g] =
          checked_unit(average_fidelity(entanglement_fidelity(channel)), "avg_fidelity");
    }

  const std::size_t grid = static_cast<std::size_t>(theta_steps) * phi_steps;
  const std::size_t total = encodings.size() * gammas.size() * grid;
  std::vector<std::string> rows(total);
  parallel_for(total, [&](std::size_t i) {
    const std::size_t e = i / (gammas.size() * grid);
    const std::size_t g = (i / grid) % gammas.size();
    const std::size_t t = (i % grid) / phi_steps;
    const std::size_t p = i % phi_steps;

    TransferConfig config;
    config.encoding = encodings[e];
    config.chain_length = chain;
    config.theta = (kPi / 2.0) * static_cast<double>(t) / (theta_steps - 1);
    config.phi = (2.0 * kPi) * static_cast<double>(p) / phi_steps;
    config.noise = natural_noise(encodings[e], gammas[g]);
    config.forced_zero = true;
    config.seed = config_seed;

    const ExperimentRecord record = run_transfer_chain(config);
    const auto bloch = record.corrected_bloch();
    Json row;
    row["theta"] = config.theta;
    row["phi"] = config.phi;
    row["gamma_t"] = gammas[g];
    row["encoding"] = encodings[e] == ChainEncoding::kStandard ? "standard" : "dfs";
    row["bloch_x"] = bloch[0];
    row["bloch_y"] = bloch[1];
    row["bloch_z"] = bloch[2];
    row["fidelity"] = checked_unit(record.fidelity_vs_ideal, "fidelity");
    row["avg_fidelity"] = cell_avg[e * gammas.size() + g];
    rows[i] = row.dump();
  });

  std::string body;
  for (const auto& row : rows) {
    body += row;
    body += '\n';
  }
  write_text(out_path, body);
  return 0;
}

int cmd_tomography(const Json& cfg, const std::string& out_path) {
  const std::string kind = cfg.value("channel", std::string("standard-chain"));
  const int chain = cfg.value("chain", 3);
  ChannelFn channel;
  Json echo;
  echo["channel"] = kind;

  if (kind == "standard-chain" || kind == "dfs-chain") {
    const double gamma_t = cfg.value("gamma_t", 0.5);
    const ChainEncoding enc =
        kind == "standard-chain" ? ChainEncoding::kStandard : ChainEncoding::kDfs;
    channel = transfer_chain_channel(enc, natural_noise(enc, gamma_t), chain);
    echo["gamma_t"] = gamma_t;
    echo["chain"] = chain;
  } else if (kind == "kraus" || kind == "kraus-file") {
    Json ops_json;
    if (kind == "kraus") {
      ops_json = cfg.at("kraus");
    } else {
      const std::string path = cfg.at("path").get<std::string>();
      ops_json = load_json(path).at("kraus");
      echo["path"] = path;
    }
    const KrausSet user = kraus_set_from_json(ops_json);
    const double deviation =
        (user.completeness() - Eigen::Matrix2cd::Identity()).norm();
    if (deviation > 1e-8)
      throw std::invalid_argument("user kraus set is not trace preserving, deviation " +
                                  sci(deviation));
    channel = channel_from_kraus(user);
  } else {
    throw std::invalid_argument("unknown channel kind: " + kind);
  }

  const ChiMatrix chi = chi_of_channel(channel);
  const KrausSet kraus = kraus_from_chi(chi);
  const double fe = checked_unit(entanglement_fidelity(channel), "entanglement_fidelity");
  const double favg = checked_unit(average_fidelity(fe), "average_fidelity");

  Json doc = echo;
  doc.update(tomography_document(chi, kraus, fe, favg));
  write_text(out_path, doc.dump(2) + "\n");
  return 0;
}

int cmd_stabilizer_check(const Json& cfg, const std::string& out_path) {
  std::vector<CheckLine> lines;
  stabilizer_suite(lines, cfg.value("kappa_flip", false));
  return report(lines, out_path);
}

int cmd_dfs3_check(const Json& cfg, const std::string& out_path,
                   std::optional<std::uint64_t> seed) {
  std::vector<CheckLine> lines;
  dfs3_suite(lines, cfg.value("beta_samples", 50), cfg.value("state_samples", 5),
             cfg.value("control_samples", 8),
             seed ? *seed : cfg.value("seed", std::uint64_t{7}));
  return report(lines, out_path);
}

int cmd_checks(const Json& cfg, const std::string& out_path,
               std::optional<std::uint64_t> seed) {
  std::vector<CheckLine> lines;
  stabilizer_suite(lines, cfg.value("kappa_flip", false));
  dfs3_suite(lines, cfg.value("beta_samples", 50), cfg.value("state_samples", 5),
             cfg.value("control_samples", 8),
             seed ? *seed : cfg.value("seed", std::uint64_t{7}));
  readout_table_suite(lines);
  return report(lines, out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-way quantum computing on encoded cluster states"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("--config", config_path, "JSON config file (defaults used when omitted)")
        ->check(CLI::ExistingFile);
    auto* out = sub->add_option("--out", out_path, "output file");
    if (out_required) out->required();
    sub->add_option("--seed", seed, "override the config seed");
  };

  CLI::App* transfer =
      app.add_subcommand("transfer", "run one measurement-driven transfer chain");
  add_common(transfer, true);
  CLI::App* sweep = app.add_subcommand(
      "bloch-sweep", "Bloch-sphere grid under dephasing, NDJSON rows");
  add_common(sweep, true);
  CLI::App* tomo = app.add_subcommand(
      "tomography", "chi matrix and Kraus set of a chain or user channel");
  add_common(tomo, true);
  CLI::App* stab =
      app.add_subcommand("stabilizer-check", "cluster correlation-operator residuals");
  add_common(stab, false);
  CLI::App* dfs3 = app.add_subcommand(
      "dfs3-check", "three-qubit code round trip, invariance, and control");
  add_common(dfs3, false);
  CLI::App* checks = app.add_subcommand("checks", "all verification suites");
  add_common(checks, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const Json cfg = config_path.empty() ? Json::object() : load_json(config_path);
    if (transfer->parsed()) return cmd_transfer(cfg, out_path, seed);
    if (sweep->parsed()) return cmd_bloch_sweep(cfg, out_path, seed);
    if (tomo->parsed()) return cmd_tomography(cfg, out_path);
    if (stab->parsed()) return cmd_stabilizer_check(cfg, out_path);
    if (dfs3->parsed()) return cmd_dfs3_check(cfg, out_path, seed);
    if (checks->parsed()) return cmd_checks(cfg, out_path, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;  // unreachable with require_subcommand(1)
}
