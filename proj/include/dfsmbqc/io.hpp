// JSON schemas for configs and results.
//
// Complex numbers serialize as [re, im]; matrices as row-major nested arrays
// of those pairs.  Everything uses ordered maps and deterministic field
// order so identical inputs produce byte-identical files.
#pragma once

#include <fstream>

#include "json.hpp"

#include "dfsmbqc/mbqc.hpp"
#include "dfsmbqc/tomography.hpp"

namespace dfsmbqc {

using Json = nlohmann::ordered_json;

inline Json to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("expected a complex number as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a matrix");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols)
      throw std::invalid_argument("ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

// --- noise ------------------------------------------------------------------

inline std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kIndependentDephasing: return "independent-dephasing";
    case NoiseKind::kCollectiveDephasing: return "collective-dephasing";
    case NoiseKind::kCollectiveUnitary: return "collective-unitary";
  }
  throw std::logic_error("unknown noise kind");
}

inline NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "independent-dephasing") return NoiseKind::kIndependentDephasing;
  if (s == "collective-dephasing") return NoiseKind::kCollectiveDephasing;
  if (s == "collective-unitary") return NoiseKind::kCollectiveUnitary;
  throw std::invalid_argument("unknown noise kind: " + s);
}

inline Json to_json(const NoiseSpec& noise) {
  Json j;
  j["kind"] = to_string(noise.kind);
  j["gamma_t"] = noise.gamma_t;
  if (noise.kind == NoiseKind::kCollectiveUnitary)
    j["beta"] = Json::array({noise.beta[0], noise.beta[1], noise.beta[2]});
  return j;
}

inline NoiseSpec noise_spec_from_json(const Json& j) {
  NoiseSpec noise;
  noise.kind = noise_kind_from_string(j.at("kind").get<std::string>());
  noise.gamma_t = j.value("gamma_t", 0.0);
  if (j.contains("beta")) {
    const auto& b = j.at("beta");
    if (!b.is_array() || b.size() != 3)
      throw std::invalid_argument("noise beta must have three components");
    noise.beta = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>()};
  }
  noise.validate();
  return noise;
}

// --- lattice ----------------------------------------------------------------

inline Json to_json(const LatticeSpec& lattice) {
  Json j;
  j["effective"] = lattice.effective_count;
  j["encoding"] = lattice.encoding == Encoding::kDualRail ? "dual-rail" : "dfs3";
  Json edges = Json::array();
  for (const auto& [a, b] : lattice.edges) edges.push_back(Json::array({a, b}));
  j["edges"] = std::move(edges);
  return j;
}

inline LatticeSpec lattice_from_json(const Json& j) {
  const std::string enc = j.at("encoding").get<std::string>();
  Encoding encoding;
  if (enc == "dual-rail")
    encoding = Encoding::kDualRail;
  else if (enc == "dfs3")
    encoding = Encoding::kDfs3;
  else
    throw std::invalid_argument("unknown lattice encoding: " + enc);

  LatticeSpec lattice = LatticeSpec::chain(j.at("effective").get<int>(), encoding);
  if (j.contains("edges")) {
    lattice.edges.clear();
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw std::invalid_argument("bad edge entry");
      lattice.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  }
  lattice.validate();
  return lattice;
}

// --- transfer experiment ------------------------------------------------------

inline TransferConfig transfer_config_from_json(const Json& j) {
  TransferConfig config;
  const std::string enc = j.value("encoding", std::string("standard"));
  if (enc == "standard")
    config.encoding = ChainEncoding::kStandard;
  else if (enc == "dfs")
    config.encoding = ChainEncoding::kDfs;
  else
    throw std::invalid_argument("unknown chain encoding: " + enc);
  config.chain_length = j.value("chain", 3);
  config.theta = j.value("theta", 0.0);
  config.phi = j.value("phi", 0.0);
  if (j.contains("noise")) config.noise = noise_spec_from_json(j.at("noise"));
  const std::string outcomes = j.value("outcomes", std::string("forced-zero"));
  if (outcomes == "forced-zero")
    config.forced_zero = true;
  else if (outcomes == "random")
    config.forced_zero = false;
  else
    throw std::invalid_argument("unknown outcomes mode: " + outcomes);
  config.seed = j.value("seed", std::uint64_t{1});
  return config;
}

inline Json to_json(const TransferConfig& config) {
  Json j;
  j["encoding"] = config.encoding == ChainEncoding::kStandard ? "standard" : "dfs";
  j["chain"] = config.chain_length;
  j["theta"] = config.theta;
  j["phi"] = config.phi;
  j["noise"] = to_json(config.noise);
  j["outcomes"] = config.forced_zero ? "forced-zero" : "random";
  j["seed"] = config.seed;
  return j;
}

inline Json to_json(const ExperimentRecord& record) {
  Json j;
  Json outcomes = Json::array();
  for (const auto& o : record.outcomes) {
    Json entry;
    entry["site"] = o.site;
    entry["basis"] = o.basis;
    entry["bit"] = o.bit;
    outcomes.push_back(std::move(entry));
  }
  j["outcomes"] = std::move(outcomes);
  j["byproduct"] = Json{{"x", record.byproduct.x_power}, {"z", record.byproduct.z_power}};
  j["logical_output"] = to_json(Matrix(record.logical_output));
  j["corrected_output"] = to_json(Matrix(record.corrected_logical()));
  const auto bloch = record.corrected_bloch();
  j["bloch"] = Json::array({bloch[0], bloch[1], bloch[2]});
  j["leakage_weight"] = record.leakage_weight;
  j["fidelity_vs_ideal"] = record.fidelity_vs_ideal;
  return j;
}

// --- process matrices ---------------------------------------------------------

inline Json to_json(const ChiMatrix& chi) { return to_json(Matrix(chi.values)); }

inline Json to_json(const KrausSet& kraus) {
  Json ops = Json::array();
  for (const auto& k : kraus.ops) ops.push_back(to_json(Matrix(k)));
  return ops;
}

inline KrausSet kraus_set_from_json(const Json& j) {
  KrausSet out;
  for (const auto& entry : j) {
    const Matrix m = matrix_from_json(entry);
    if (m.rows() != 2 || m.cols() != 2)
      throw std::invalid_argument("kraus operators must be 2x2");
    out.ops.push_back(Eigen::Matrix2cd(m));
  }
  if (out.ops.empty()) throw std::invalid_argument("empty kraus set");
  return out;
}

// full tomography document: basis label order matches the chi row/column order
inline Json tomography_document(const ChiMatrix& chi, const KrausSet& kraus,
                                double entanglement_fid, double average_fid) {
  Json j;
  j["basis"] = Json::array({"I", "X", "Y", "Z"});
  j["chi"] = to_json(chi);
  j["kraus"] = to_json(kraus);
  j["entanglement_fidelity"] = entanglement_fid;
  j["average_fidelity"] = average_fid;
  return j;
}

// --- files --------------------------------------------------------------------

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  Json j;
  in >> j;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

}  // namespace dfsmbqc
