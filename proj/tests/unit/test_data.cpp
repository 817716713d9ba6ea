#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bayal/data.hpp"

using namespace bayal;

namespace {

SyntheticSpec paper_spec(Seed seed) {
  SyntheticSpec spec;
  spec.theta_true.mu = 0.5;
  spec.theta_true.sigma = 1.0;
  spec.theta_true.weights = (VectorXd(2) << 0.7, 0.3).finished();
  spec.seed = seed;
  return spec;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("generate_synthetic geometry") {
  const SyntheticSpec spec = paper_spec(1);

  SUBCASE("x2 closes the level equation") {
    // Level 10 has probability 0.5; at x1 = 0.5 the solved x2 is 0.5.
    const double x2 = (0.5 + 1.0 * logit(0.5) - 0.7 * 0.5) / 0.3;
    CHECK(x2 == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("every row sits exactly on its probability level") {
    const Pool pool = generate_synthetic(spec);
    for (Index i = 0; i < pool.N(); ++i) {
      const int level = static_cast<int>(i / spec.points_per_level) + 1;
      const double alpha = 0.05 * level;
      CHECK(predict_prob(spec.theta_true, VectorXd(pool.row(i))) ==
            doctest::Approx(alpha).epsilon(1e-12));
    }
  }

  SUBCASE("pool sizes follow points_per_level") {
    CHECK(generate_synthetic(spec).N() == 95);
    SyntheticSpec doubled = spec;
    doubled.points_per_level = 10;
    CHECK(generate_synthetic(doubled).N() == 190);
  }

  SUBCASE("regeneration is bit-identical") {
    const Pool a = generate_synthetic(spec);
    const Pool b = generate_synthetic(spec);
    CHECK((a.features() - b.features()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.true_labels() - b.true_labels()).cwiseAbs().maxCoeff() == 0);
  }

  SUBCASE("x1 stays within its sliding windows") {
    const Pool pool = generate_synthetic(spec);
    for (Index i = 0; i < pool.N(); ++i) {
      const int level = static_cast<int>(i / spec.points_per_level);
      CHECK(pool.features()(i, 0) >= -3.0 + 0.15 * level);
      CHECK(pool.features()(i, 0) <= 0.0 + 0.15 * level);
    }
  }

  SUBCASE("degenerate generator is rejected") {
    SyntheticSpec bad = spec;
    bad.theta_true.weights = (VectorXd(3) << 0.4, 0.3, 0.3).finished();
    CHECK_THROWS(generate_synthetic(bad));
  }
}

TEST_CASE("uneven level grids shift the class balance") {
  SyntheticSpec spec = paper_spec(9);
  spec.points_per_level = 10;
  spec.level_skew = 5.82;  // mean level probability ~0.2 -> 1:4 groups

  SUBCASE("grid keeps its range but curves toward low probabilities") {
    CHECK(spec.level_alpha(1) == doctest::Approx(0.05));
    CHECK(spec.level_alpha(19) == doctest::Approx(0.95));
    double mean = 0.0;
    for (int j = 1; j <= 19; ++j) mean += spec.level_alpha(j);
    mean /= 19.0;
    CHECK(mean == doctest::Approx(0.2).epsilon(0.01));
  }

  SUBCASE("the default skew of one is the even grid") {
    SyntheticSpec even = paper_spec(9);
    for (int j = 1; j <= 19; ++j) {
      CHECK(even.level_alpha(j) == doctest::Approx(0.05 * j).epsilon(1e-12));
    }
  }

  SUBCASE("realized labels follow the skewed grid") {
    const Pool pool = generate_synthetic(spec);
    const double positive = pool.true_labels().cast<double>().mean();
    CHECK(positive < 0.3);
    CHECK(positive > 0.1);
  }
}

TEST_CASE("elicit_priors formulas") {
  SUBCASE("symmetric suspicion levels give the 2 log 19 denominator") {
    CHECK(logit(0.95) - logit(0.05) == doctest::Approx(2.0 * std::log(19.0)).epsilon(1e-12));
  }

  SUBCASE("fixed geometry reproduces hand-computed hyperparameters") {
    // Projection z = 0.5 x1 + 0.5 x2 spanning exactly [-2, 2].
    MatrixXd X(3, 2);
    X << -2.0, -2.0, 0.0, 0.0, 2.0, 2.0;
    Pool pool(X, VectorXi::Zero(3));
    const PriorSpec prior = elicit_priors(pool, 0.05, 0.95, VectorXd::Constant(2, 0.5));
    CHECK(prior.mu0 == doctest::Approx(0.0));
    CHECK(prior.sigma0 == doctest::Approx(4.0 / (2.0 * std::log(19.0))).epsilon(1e-12));
    CHECK(prior.sigma0 == doctest::Approx(0.6792).epsilon(1e-4));
    CHECK(prior.sigma_mu2 == doctest::Approx(4.0));  // sample variance of {-2,0,2}
    CHECK(prior.alpha.size() == 2);
    CHECK(prior.alpha[0] == doctest::Approx(1.5));
  }

  SUBCASE("degenerate projection is rejected") {
    MatrixXd X(3, 2);
    X << 1.0, -1.0, 2.0, -2.0, 0.5, -0.5;
    Pool pool(X, VectorXi::Zero(3));
    CHECK_THROWS(elicit_priors(pool, 0.05, 0.95, VectorXd::Constant(2, 0.5)));
  }
}

TEST_CASE("bupa loader") {
  const std::string good =
      "85,92,45,27,31,0.0,1\n"
      "85,64,59,32,23,0.0,2\n"
      "86,54,33,16,54,0.0,1\n"
      "91,78,34,24,36,6.0,2\n";

  SUBCASE("parses, maps selector 2 to class 1, standardizes") {
    const auto [pool, meta] = load_bupa(temp_file("bayal_bupa_ok.csv", good).string());
    CHECK(meta.N == 4);
    CHECK(meta.p == 6);
    CHECK(pool.true_labels()[0] == 0);
    CHECK(pool.true_labels()[1] == 1);
    CHECK(meta.positive_fraction == doctest::Approx(0.5));
    for (Index j = 0; j < 6; ++j) {
      CHECK(std::abs(pool.features().col(j).mean()) < 1e-10);
      const double sd = std::sqrt(
          (pool.features().col(j).array() - pool.features().col(j).mean()).square().sum() /
          (pool.N() - 1));
      CHECK(sd == doctest::Approx(1.0).epsilon(1e-10));
    }
    // The expected-count warning fires for a 4-row fixture.
    CHECK(!meta.warnings.empty());
  }

  SUBCASE("truncated row names its line") {
    const std::string bad = "85,92,45,27,31,0.0,1\n85,64,59\n";
    try {
      load_bupa(temp_file("bayal_bupa_bad.csv", bad).string());
      FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }

  SUBCASE("non-numeric field names its line") {
    const std::string bad = "85,92,45,27,xx,0.0,1\n";
    try {
      load_bupa(temp_file("bayal_bupa_bad2.csv", bad).string());
      FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
  }
}

TEST_CASE("wdbc loader") {
  std::string good;
  // Four rows, 30 feature columns each; malignant rows get larger values so
  // no negative-direction warning fires.
  for (int i = 0; i < 4; ++i) {
    good += std::to_string(1000 + i);
    good += (i % 2 == 0) ? ",M" : ",B";
    for (int j = 0; j < 30; ++j) {
      good += "," + std::to_string((i % 2 == 0 ? 10.0 : 1.0) + 0.25 * i + 0.1 * j);
    }
    good += "\n";
  }

  SUBCASE("parses and maps M to class 1") {
    const auto [pool, meta] = load_wdbc(temp_file("bayal_wdbc_ok.csv", good).string());
    CHECK(meta.N == 4);
    CHECK(meta.p == 30);
    CHECK(pool.true_labels()[0] == 1);
    CHECK(pool.true_labels()[1] == 0);
    CHECK(meta.positive_fraction == doctest::Approx(0.5));
  }

  SUBCASE("bad diagnosis letter is a parse error") {
    std::string bad = good;
    bad[bad.find(",B") + 1] = 'Q';
    CHECK_THROWS(load_wdbc(temp_file("bayal_wdbc_bad.csv", bad).string()));
  }
}

TEST_CASE("negative label correlation raises a warning, not an error") {
  std::string rows;
  // Feature 0 decreases with the label (selector 2 rows get small values).
  rows += "1,10,10,10,10,1.0,2\n";
  rows += "9,11,11,11,11,2.0,1\n";
  rows += "2,12,12,12,10,1.5,2\n";
  rows += "8,13,13,13,13,2.5,1\n";
  const auto [pool, meta] = load_bupa(temp_file("bayal_bupa_neg.csv", rows).string());
  bool warned = false;
  for (const auto& w : meta.warnings) {
    warned = warned || w.find("negatively") != std::string::npos;
  }
  CHECK(warned);
  CHECK(pool.N() == 4);
}

TEST_CASE("export_pool_csv writes the documented header") {
  SyntheticSpec spec = paper_spec(3);
  spec.points_per_level = 1;
  const Pool pool = generate_synthetic(spec);
  const auto path = std::filesystem::temp_directory_path() / "bayal_pool.csv";
  export_pool_csv(pool, path.string());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x1,x2,y");
  std::string first;
  std::getline(in, first);
  CHECK(!first.empty());
}
