#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "polyshoot/analysis.hpp"
#include "polyshoot/errors.hpp"
#include "polyshoot/system_spec.hpp"

using namespace polyshoot;

namespace {

bool has_violation(const ValidationReport& r, const std::string& msg) {
  for (const auto& v : r.violations) {
    if (v.message == msg) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("validate") {
  CHECK(validate(oracle::scalar(3, 1, 0, 5)).ok());
  CHECK(has_violation(validate(oracle::scalar(3, 2, 0, 5)), "2k < n fails"));
  CHECK(has_violation(validate(oracle::scalar(5, 1, 2.5, 3)), "sigma < 2 required"));
  CHECK(has_violation(validate(oracle::scalar(2, 1, 0, 3)), "n >= 3 required"));
  CHECK(has_violation(validate(oracle::scalar(3, 1, 0, 3, -1.0)), "coef > 0 required"));
  CHECK(has_violation(validate(oracle::scalar(3, 1, 0, -1.0)), "powers must be finite and >= 0"));

  SystemSpec bad = oracle::lane_emden(5, 5);
  bad.equations[0].rhs[0].powers.pop_back();
  CHECK_FALSE(validate(bad).ok());
  CHECK_THROWS_AS(require_valid(bad), InvalidSpec);
}

TEST_CASE("reduce: scalar k=1 is one source row") {
  const ReducedSystem rs = reduce(oracle::scalar(3, 1, 0, 5));
  CHECK(rs.size() == 1);
  CHECK(std::holds_alternative<SourceTerm>(rs.row(0)));
}

TEST_CASE("reduce: biharmonic chain") {
  const ReducedSystem rs = reduce(oracle::scalar(5, 2, 0, 9));
  REQUIRE(rs.size() == 2);
  REQUIRE(std::holds_alternative<ChainLink>(rs.row(0)));
  CHECK(std::get<ChainLink>(rs.row(0)).target == 1);
  const auto& src = std::get<SourceTerm>(rs.row(1));
  REQUIRE(src.monomials.size() == 1);
  REQUIRE(src.monomials[0].factors.size() == 1);
  CHECK(src.monomials[0].factors[0].first == 0);
}

TEST_CASE("reduce: two-equation 2k chain") {
  const int k = 3;
  const ReducedSystem rs = reduce(oracle::pair(7, k, 1.0, 4.0, 4.0, 2.0, 0.5, 1.0));
  REQUIRE(rs.size() == 2 * k);
  for (int m = 0; m < 2 * k; ++m) {
    if (m == k - 1 || m == 2 * k - 1) continue;
    REQUIRE(std::holds_alternative<ChainLink>(rs.row(m)));
    CHECK(std::get<ChainLink>(rs.row(m)).target == m + 1);
  }
  // -Lap w_{2k} = w_{k+1}^t w_1^p / r^sigma2
  const auto& last = std::get<SourceTerm>(rs.row(2 * k - 1));
  CHECK(last.monomials[0].sigma == 1.0);
  CHECK(last.monomials[0].factors == std::vector<std::pair<int, double>>{{0, 4.0}, {k, 2.0}});
  const auto& mid = std::get<SourceTerm>(rs.row(k - 1));
  CHECK(mid.monomials[0].factors == std::vector<std::pair<int, double>>{{0, 1.0}, {k, 4.0}});
}

TEST_CASE("reduce: index map round-trips and rows are positive on positive states") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pos(0.01, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const SystemSpec spec = oracle::random_spec(rng);
    const ReducedSystem rs = reduce(spec);
    for (int m = 0; m < rs.size(); ++m) CHECK(rs.chain_index(rs.index_of(m)) == m);
    Eigen::VectorXd w(rs.size());
    for (int m = 0; m < rs.size(); ++m) w[m] = pos(rng);
    for (int m = 0; m < rs.size(); ++m) {
      const double v = rs.row_value(m, pos(rng), w);
      CHECK(v > 0.0);
      if (const auto* link = std::get_if<ChainLink>(&rs.row(m))) CHECK(v == w[link->target]);
    }
  }
}

TEST_CASE("criticality examples") {
  const auto crit = classify_criticality(oracle::scalar(3, 1, 0, 5));
  CHECK(crit.cls == Criticality::Critical);
  CHECK(crit.threshold_value == doctest::Approx(5.0));

  const auto le = classify_criticality(oracle::lane_emden(5, 5));
  CHECK(le.cls == Criticality::Critical);
  CHECK(le.compared_value == doctest::Approx(1.0));
  CHECK(le.existence_condition);

  const auto low = classify_criticality(oracle::lane_emden(1, 1));
  CHECK(low.cls == Criticality::Subcritical);
  CHECK(low.compared_value == doctest::Approx(3.0));
  CHECK_FALSE(low.existence_condition);

  CHECK(classify_criticality(oracle::scalar(3, 1, 0, 7)).cls == Criticality::Supercritical);
  CHECK(classify_criticality(oracle::scalar(3, 1, 0, 2)).cls == Criticality::Subcritical);

  SystemSpec two_terms = oracle::scalar(3, 1, 0, 5);
  two_terms.equations[0].rhs.push_back({1.0, 0.0, {3.0}});
  CHECK(classify_criticality(two_terms).cls == Criticality::NotClassifiable);
}

TEST_CASE("criticality is monotone in p") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> pdist(1.0, 20.0);
  std::uniform_real_distribution<double> sdist(-1.0, 1.9);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 6;
    const int k = 1 + (trial / 6) % ((n - 1) / 2);
    const double sigma = sdist(rng);
    double p1 = pdist(rng);
    double p2 = pdist(rng);
    if (p1 > p2) std::swap(p1, p2);
    const auto c1 = classify_criticality(oracle::scalar(n, k, sigma, p1)).cls;
    const auto c2 = classify_criticality(oracle::scalar(n, k, sigma, p2)).cls;
    if (c1 == Criticality::Supercritical) CHECK(c2 == Criticality::Supercritical);
  }
}

TEST_CASE("classifier and Pohozaev bracket agree on sign") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> pdist(0.5, 15.0);
  std::uniform_real_distribution<double> sdist(-1.0, 1.9);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 6;
    const int k = 1 + (trial / 6) % ((n - 1) / 2);
    const SystemSpec spec = trial % 2 ? oracle::scalar(n, k, sdist(rng), pdist(rng))
                                      : oracle::pair(n, k, 0.0, pdist(rng), pdist(rng), 0.0, sdist(rng), sdist(rng));
    const auto cls = classify_criticality(spec).cls;
    const double bracket = pohozaev_bracket(recognise_shape(spec));
    CHECK((cls != Criticality::Subcritical) == (bracket <= 1e-12));
  }
}

TEST_CASE("non-degeneracy: weighted HLS system is type I") {
  const auto rep = check_nondegeneracy(oracle::pair(7, 2, 0.0, 4.0, 4.0, 0.0, 1.0, 1.0));
  CHECK(rep.type1 == Verdict::Holds);
}

TEST_CASE("non-degeneracy: Schroedinger system is type II but not type I") {
  // u^s v^q / v^t u^p with p >= s and q >= t
  const auto rep = check_nondegeneracy(oracle::pair(3, 1, 1.0, 2.0, 2.0, 1.0));
  CHECK(rep.type2 == Verdict::Holds);
  CHECK(rep.type1 == Verdict::Fails);
  CHECK(rep.cond1_lower_bound == Verdict::Fails);
}

TEST_CASE("non-degeneracy: type II needs autonomous, fully supported terms") {
  CHECK(check_nondegeneracy(oracle::pair(3, 1, 1.0, 2.0, 2.0, 1.0, 0.5, 0.0)).type2 == Verdict::Fails);
  CHECK(check_nondegeneracy(oracle::lane_emden(5, 5)).type2 == Verdict::Fails);
}

TEST_CASE("non-degeneracy: single monomial scalar") {
  // A chain link (k >= 2) or a non-decaying weight keeps F away from zero at infinity.
  for (int n : {3, 5, 7}) {
    for (double sigma : {-1.5, -0.5, 0.0, 0.5, 1.5}) {
      for (int k = 1; 2 * k < n; ++k) {
        const auto rep = check_nondegeneracy(oracle::scalar(n, k, sigma, 3.0));
        CHECK(rep.cond1_lower_bound == Verdict::Holds);
        const bool expect = k >= 2 || sigma <= 0.0;
        CHECK((rep.type1 == Verdict::Holds) == expect);
      }
    }
  }
}
