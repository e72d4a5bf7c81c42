#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sensemap/metric.hpp"
#include "test_util.hpp"

using namespace sensemap;
using testutil::line_matrix;
using testutil::oracle_catalogue;

namespace {

// Ground-truth phi for one displacement, sampled on the scanning grid.
PhiFunction exact_phi(double d, int episode_id) {
  PhiFunction phi;
  phi.episode_id = episode_id;
  phi.true_d = d;
  for (int i = 0; i <= 1000; ++i) {
    const double p = i * 0.001;
    if (const auto pp = ground_truth_phi(d, p)) phi.pairs.push_back({p, *pp});
  }
  phi.norm = phi_norm(phi);
  return phi;
}

}  // namespace

TEST_CASE("sample_grid covers [0,1] with both endpoints") {
  const auto grid = sample_grid(0.01);
  REQUIRE(grid.size() == 101);
  REQUIRE(grid.front() == 0.0);
  REQUIRE(grid.back() == Catch::Approx(1.0).margin(1e-12));
  for (std::size_t i = 1; i < grid.size(); ++i)
    REQUIRE(grid[i] - grid[i - 1] == Catch::Approx(0.01).margin(1e-12));
}

TEST_CASE("sample_grid rejects bad steps") {
  REQUIRE_THROWS_AS(sample_grid(0.0), ConfigError);
  REQUIRE_THROWS_AS(sample_grid(-0.01), ConfigError);
  REQUIRE_THROWS_AS(sample_grid(1.5), ConfigError);
  REQUIRE_THROWS_AS(sample_grid(0.03), ConfigError);
}

TEST_CASE("build_distance_matrix rejects an empty catalogue") {
  REQUIRE_THROWS_AS(build_distance_matrix(PhiCatalogue{}), ContractError);
}

TEST_CASE("single-displacement catalogue: every linked entry carries that norm") {
  PhiCatalogue cat;
  cat.items.push_back(exact_phi(0.3, 1));
  const double norm = cat.items[0].norm;
  const auto m = build_distance_matrix(cat, 0.01);

  REQUIRE(m.size() == 101);
  long long linked = 0;
  for (int i = 0; i < m.size(); ++i) {
    REQUIRE(m.defined(i, i));
    REQUIRE(m.values[i][i] == 0.0);
    for (int j = i + 1; j < m.size(); ++j) {
      if (!m.defined(i, j)) continue;
      ++linked;
      REQUIRE(m.values[i][j] == norm);
    }
  }
  // the graph of phi crosses the sample lattice often enough to matter
  REQUIRE(linked >= 20);
}

TEST_CASE("distance matrix over the exact catalogue is symmetric and bounded") {
  const auto m = build_distance_matrix(oracle_catalogue(), 0.01);
  for (int i = 0; i < m.size(); ++i) {
    for (int j = i + 1; j < m.size(); ++j) {
      REQUIRE(m.defined(i, j) == m.defined(j, i));
      REQUIRE(m.values[i][j] == m.values[j][i]);
      if (m.defined(i, j)) {
        REQUIRE(m.values[i][j] >= 0.0);
        REQUIRE(m.values[i][j] <= 1.0);
      }
    }
  }
  REQUIRE(testutil::defined_fraction(m) > 0.5);
}

TEST_CASE("axioms hold exactly on a line matrix") {
  const auto rep = check_metric_axioms(line_matrix(0.1), 1e-12);
  REQUIRE(rep.identity_violations == 0);
  REQUIRE(rep.symmetry_violations == 0);
  REQUIRE(rep.negative_entries == 0);
  REQUIRE(rep.diagonal_errors == 0);
  REQUIRE(rep.triangle_violations == 0);
  REQUIRE(rep.defined_triples == 165);  // C(11,3)
}

TEST_CASE("axiom checker flags planted violations") {
  SECTION("triangle excess") {
    auto m = line_matrix(0.5);  // sample {0, 0.5, 1}
    m.values[0][2] = m.values[2][0] = 2.0;
    const auto rep = check_metric_axioms(m, 0.02);
    REQUIRE(rep.triangle_violations == 1);
    REQUIRE(rep.worst_excess == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("asymmetry") {
    auto m = line_matrix(0.5);
    m.values[0][1] = 0.6;
    const auto rep = check_metric_axioms(m);
    REQUIRE(rep.symmetry_violations == 1);
  }
  SECTION("negative entry is also an identity violation") {
    auto m = line_matrix(0.5);
    m.values[0][1] = m.values[1][0] = -0.25;
    const auto rep = check_metric_axioms(m);
    REQUIRE(rep.negative_entries == 1);
    REQUIRE(rep.identity_violations == 1);
  }
  SECTION("dirty diagonal") {
    auto m = line_matrix(0.5);
    m.values[1][1] = 0.3;
    m.mask[2][2] = 0;
    const auto rep = check_metric_axioms(m);
    REQUIRE(rep.diagonal_errors == 2);
  }
}

TEST_CASE("exact catalogue satisfies the axioms within slack") {
  const auto m = build_distance_matrix(oracle_catalogue(), 0.01);
  const auto rep = check_metric_axioms(m, 0.02);
  REQUIRE(rep.identity_violations == 0);
  REQUIRE(rep.symmetry_violations == 0);
  REQUIRE(rep.negative_entries == 0);
  REQUIRE(rep.diagonal_errors == 0);
  REQUIRE(rep.defined_triples > 10000);
  const double rate = static_cast<double>(rep.triangle_violations) /
                      static_cast<double>(rep.defined_triples);
  REQUIRE(rate <= 0.001);
}

TEST_CASE("matrix CSV round-trip is exact") {
  PhiCatalogue cat;
  cat.items.push_back(exact_phi(0.2, 4));
  const auto m = build_distance_matrix(cat, 0.1);

  const auto values = matrix_values_to_csv(m);
  const auto mask = matrix_mask_to_csv(m);
  const auto meta = matrix_meta_to_json(m, 99);
  REQUIRE(meta.at("seed").get<std::uint64_t>() == 99);

  const auto back = matrix_from_csv(values, mask, meta);
  REQUIRE(back.step == m.step);
  REQUIRE(back.sample == m.sample);
  REQUIRE(back.values == m.values);
  REQUIRE(back.mask == m.mask);
}

TEST_CASE("matrix_from_csv rejects malformed input") {
  PhiCatalogue cat;
  cat.items.push_back(exact_phi(0.2, 4));
  const auto m = build_distance_matrix(cat, 0.5);
  const auto values = matrix_values_to_csv(m);
  const auto mask = matrix_mask_to_csv(m);
  const auto meta = matrix_meta_to_json(m, 0);

  REQUIRE_THROWS_AS(matrix_from_csv("0,0\n", mask, meta), IoError);
  REQUIRE_THROWS_AS(matrix_from_csv(values, "1,1,1\n1,1,1\n2,1,1\n", meta), IoError);
  nlohmann::json bad = meta;
  bad.erase("sample");
  REQUIRE_THROWS_AS(matrix_from_csv(values, mask, bad), IoError);
}
