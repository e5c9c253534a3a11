#include <cstdio>
#include <filesystem>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "dfsmbqc/io.hpp"
#include "test_helpers.hpp"

using namespace dfsmbqc;
using Catch::Approx;
using testutil::check_close;

TEST_CASE("complex numbers round trip as [re, im]", "[io]") {
  const Complex z{0.25, -1.5};
  const Json j = to_json(z);
  REQUIRE(j.is_array());
  CHECK(j[0].get<double>() == 0.25);
  CHECK(j[1].get<double>() == -1.5);
  CHECK(complex_from_json(j) == z);

  CHECK_THROWS_AS(complex_from_json(Json{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(complex_from_json(Json::array({1.0, 2.0, 3.0})), std::invalid_argument);
  CHECK_THROWS_AS(complex_from_json(Json::object()), std::invalid_argument);
}

TEST_CASE("matrices round trip row major", "[io]") {
  std::mt19937_64 rng(81);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(3, 2);
  for (Eigen::Index r = 0; r < 3; ++r)
    for (Eigen::Index c = 0; c < 2; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));

  const Json j = to_json(m);
  REQUIRE(j.size() == 3);
  REQUIRE(j[0].size() == 2);
  CHECK(complex_from_json(j[1][0]) == m(1, 0));
  check_close(matrix_from_json(j), m, 1e-15);

  Json ragged = j;
  ragged[1].erase(1);
  CHECK_THROWS_AS(matrix_from_json(ragged), std::invalid_argument);
  CHECK_THROWS_AS(matrix_from_json(Json::array()), std::invalid_argument);
  CHECK_THROWS_AS(matrix_from_json(Json(3.0)), std::invalid_argument);
}

TEST_CASE("noise specs round trip and validate", "[io]") {
  NoiseSpec collective;
  collective.kind = NoiseKind::kCollectiveDephasing;
  collective.gamma_t = 0.7;
  const Json j = to_json(collective);
  CHECK(j.at("kind") == "collective-dephasing");
  CHECK_FALSE(j.contains("beta"));  // only unitary kicks carry an axis
  const NoiseSpec back = noise_spec_from_json(j);
  CHECK(back.kind == collective.kind);
  CHECK(back.gamma_t == collective.gamma_t);

  NoiseSpec kick;
  kick.kind = NoiseKind::kCollectiveUnitary;
  kick.beta = {0.1, -0.2, 0.3};
  const NoiseSpec kick_back = noise_spec_from_json(to_json(kick));
  CHECK(kick_back.beta == kick.beta);

  CHECK_THROWS_AS(noise_spec_from_json(Json{{"kind", "thermal"}}), std::invalid_argument);
  CHECK_THROWS_AS(
      noise_spec_from_json(Json{{"kind", "collective-unitary"}, {"beta", Json::array({1.0})}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      noise_spec_from_json(Json{{"kind", "independent-dephasing"}, {"gamma_t", -1.0}}),
      std::invalid_argument);
}

TEST_CASE("lattice specs round trip", "[io]") {
  const LatticeSpec chain = LatticeSpec::chain(3);
  const Json j = to_json(chain);
  CHECK(j.at("encoding") == "dual-rail");
  CHECK(j.at("effective") == 3);
  REQUIRE(j.at("edges").size() == 2);

  const LatticeSpec back = lattice_from_json(j);
  CHECK(back.effective_count == chain.effective_count);
  CHECK(back.encoding == chain.encoding);
  CHECK(back.edges == chain.edges);

  CHECK(lattice_from_json(to_json(LatticeSpec::chain(2, Encoding::kDfs3))).encoding ==
        Encoding::kDfs3);

  CHECK_THROWS_AS(lattice_from_json(Json{{"effective", 2}, {"encoding", "braille"}}),
                  std::invalid_argument);
  Json bad_edge = j;
  bad_edge["edges"][0] = Json::array({0});
  CHECK_THROWS_AS(lattice_from_json(bad_edge), std::invalid_argument);
}

TEST_CASE("transfer config defaults", "[io]") {
  const TransferConfig config = transfer_config_from_json(Json::object());
  CHECK(config.encoding == ChainEncoding::kStandard);
  CHECK(config.chain_length == 3);
  CHECK(config.theta == 0.0);
  CHECK(config.forced_zero);
  CHECK(config.seed == 1);
}

TEST_CASE("transfer config round trips to identical bytes", "[io]") {
  Json j;
  j["encoding"] = "dfs";
  j["chain"] = 3;
  j["theta"] = 0.7;
  j["phi"] = -0.3;
  j["noise"] = Json{{"kind", "collective-dephasing"}, {"gamma_t", 5.0}};
  j["outcomes"] = "random";
  j["seed"] = 42;

  const TransferConfig config = transfer_config_from_json(j);
  CHECK(config.encoding == ChainEncoding::kDfs);
  CHECK_FALSE(config.forced_zero);
  CHECK(config.seed == 42);

  const std::string once = to_json(config).dump(2);
  const std::string twice = to_json(transfer_config_from_json(to_json(config))).dump(2);
  CHECK(once == twice);

  CHECK_THROWS_AS(transfer_config_from_json(Json{{"encoding", "heralded"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(transfer_config_from_json(Json{{"outcomes", "postselected"}}),
                  std::invalid_argument);
}

TEST_CASE("experiment records serialize every reported field", "[io]") {
  TransferConfig config;
  config.theta = 0.6;
  config.phi = 1.2;
  const ExperimentRecord record = run_transfer_chain(config);
  const Json j = to_json(record);

  for (const char* key : {"outcomes", "byproduct", "logical_output", "corrected_output",
                          "bloch", "leakage_weight", "fidelity_vs_ideal"})
    CHECK(j.contains(key));
  REQUIRE(j.at("outcomes").size() == 2);
  CHECK(j.at("outcomes")[0].contains("site"));
  CHECK(j.at("outcomes")[0].contains("basis"));
  CHECK(j.at("outcomes")[0].contains("bit"));
  CHECK(j.at("byproduct").contains("x"));
  CHECK(j.at("byproduct").contains("z"));
  CHECK(j.at("bloch").size() == 3);
  CHECK(j.at("fidelity_vs_ideal").get<double>() == Approx(1.0).margin(1e-12));

  // the serialized corrected state parses back to the frame-corrected matrix
  const Matrix corrected = matrix_from_json(j.at("corrected_output"));
  check_close(corrected, Matrix(record.corrected_logical()), 1e-15);
}

TEST_CASE("kraus sets round trip and reject malformed input", "[io]") {
  const KrausSet set = testutil::transfer_reference_kraus(0.5);
  const KrausSet back = kraus_set_from_json(to_json(set));
  REQUIRE(back.ops.size() == set.ops.size());
  for (std::size_t i = 0; i < set.ops.size(); ++i)
    check_close(Matrix(back.ops[i]), Matrix(set.ops[i]), 1e-15);

  CHECK_THROWS_AS(kraus_set_from_json(Json::array()), std::invalid_argument);
  const Json big = Json::array({to_json(Matrix(Matrix::Identity(3, 3)))});
  CHECK_THROWS_AS(kraus_set_from_json(big), std::invalid_argument);
}

TEST_CASE("tomography documents carry the basis labels", "[io]") {
  ChiMatrix chi;
  chi.values.setZero();
  chi.values(0, 0) = 1.0;
  KrausSet id;
  id.ops.push_back(Eigen::Matrix2cd::Identity());
  const Json doc = tomography_document(chi, id, 1.0, 1.0);
  CHECK(doc.at("basis") == Json::array({"I", "X", "Y", "Z"}));
  CHECK(doc.contains("chi"));
  CHECK(doc.contains("kraus"));
  CHECK(doc.at("entanglement_fidelity") == 1.0);
  CHECK(doc.at("average_fidelity") == 1.0);
}

TEST_CASE("identical structures dump to identical bytes", "[io]") {
  TransferConfig a, b;
  a.theta = b.theta = 0.5;
  a.noise.gamma_t = b.noise.gamma_t = 0.25;
  CHECK(to_json(a).dump(2) == to_json(b).dump(2));

  const ExperimentRecord ra = run_transfer_chain(a);
  const ExperimentRecord rb = run_transfer_chain(b);
  CHECK(to_json(ra).dump(2) == to_json(rb).dump(2));
}

TEST_CASE("file helpers round trip through disk", "[io]") {
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "dfsmbqc_io_test.json";
  Json j;
  j["alpha"] = 1.5;
  j["vector"] = Json::array({1, 2, 3});
  write_text(path.string(), j.dump(2));
  CHECK(load_json(path.string()) == j);
  std::remove(path.string().c_str());

  CHECK_THROWS_AS(load_json("/nonexistent/definitely/missing.json"), std::invalid_argument);
  CHECK_THROWS_AS(write_text("/nonexistent/definitely/missing.json", "x"),
                  std::invalid_argument);
}
