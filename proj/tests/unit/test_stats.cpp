#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <json.hpp>

#include "helpers.hpp"
#include "playful/error.hpp"
#include "playful/stats.hpp"

using namespace playful;

namespace {

nlohmann::json ttest_oracle() {
  std::ifstream in(testing::fixture("ttest_oracle.json"));
  return nlohmann::json::parse(in);
}

// Two-sided tail of Student's t by numerical integration of the density.
double quadrature_two_sided_p(double t, double df) {
  const double log_c = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * M_PI);
  auto density = [&](double x) { return std::exp(log_c - (df + 1) / 2 * std::log1p(x * x / df)); };
  boost::math::quadrature::exp_sinh<double> integrator;
  return 2.0 * integrator.integrate(density, std::abs(t), std::numeric_limits<double>::infinity());
}

std::vector<double> random_group(std::mt19937_64& rng, std::size_t n, double mu, double sd) {
  std::normal_distribution<double> d(mu, sd);
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(d(rng));
  return v;
}

}  // namespace

TEST_CASE("precision and recall") {
  auto pr = precision_recall({.tp = 49, .fp = 1, .tn = 0, .fn = 8});
  REQUIRE(pr.precision);
  REQUIRE(pr.recall);
  CHECK(*pr.precision == doctest::Approx(0.98).epsilon(1e-12));
  CHECK(std::abs(*pr.recall - 0.86) <= 0.005);

  auto undefined = precision_recall({});
  CHECK(!undefined.precision);
  CHECK(!undefined.recall);
  CHECK(!f1_score({}));
  CHECK(!f1_score({.tp = 0, .fp = 3, .tn = 1, .fn = 2}));
  CHECK(*f1_score({.tp = 2, .fp = 2, .tn = 0, .fn = 2}) == doctest::Approx(0.5));

  ConfusionCounts sum{.tp = 1, .fp = 2, .tn = 3, .fn = 4};
  sum += {.tp = 1, .fp = 1, .tn = 1, .fn = 1};
  CHECK(sum == ConfusionCounts{.tp = 2, .fp = 3, .tn = 4, .fn = 5});
  CHECK(sum.total() == 14);
}

TEST_CASE("Likert normalization") {
  for (int raw = 1; raw <= 7; ++raw) CHECK(normalize_likert(raw) == (raw - 1) / 6.0);
  CHECK(normalize_likert(1) == 0.0);
  CHECK(normalize_likert(7) == 1.0);
  for (int raw = 1; raw < 7; ++raw) CHECK(normalize_likert(raw) < normalize_likert(raw + 1));
  CHECK_THROWS_AS(normalize_likert(0), ContractError);
  CHECK_THROWS_AS(normalize_likert(8), ContractError);
}

TEST_CASE("t-test matches the frozen scipy reference") {
  auto o = ttest_oracle();
  REQUIRE(o["cases"].size() == 20);
  for (const auto& c : o["cases"]) {
    auto a = c["a"].get<std::vector<double>>();
    auto b = c["b"].get<std::vector<double>>();
    CAPTURE(c["name"].get<std::string>());
    for (auto [key, model] : {std::pair{"pooled", VarianceModel::Pooled}, std::pair{"welch", VarianceModel::Welch}}) {
      auto r = students_t_test(a, b, model);
      CHECK(std::abs(r.t - c[key]["t"].get<double>()) <= 1e-9);
      CHECK(std::abs(r.p - c[key]["p"].get<double>()) <= 1e-8);
      CHECK(r.df == doctest::Approx(c[key]["df"].get<double>()).epsilon(1e-10));
    }
  }
}

TEST_CASE("identical groups give t = 0 and p = 1 exactly") {
  auto o = ttest_oracle()["identical"];
  auto a = o["a"].get<std::vector<double>>();
  auto r = students_t_test(a, a);
  CHECK(r.t == 0.0);
  CHECK(r.p == 1.0);
  CHECK(r.effect_size == 0.0);
}

TEST_CASE("t-test fields on a hand example") {
  std::vector<double> a{1, 2, 3, 4, 5}, b{3, 4, 5, 6, 7};
  auto r = students_t_test(a, b);
  CHECK(r.mean_a == 3.0);
  CHECK(r.mean_b == 5.0);
  CHECK(r.effect_size == 2.0);
  CHECK(r.df == 8.0);
  CHECK(r.t == doctest::Approx(-2.0));
}

TEST_CASE("t-test symmetry and location-scale invariance") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 200; ++i) {
    auto a = random_group(rng, 2 + rng() % 30, 0.0, 1.0);
    auto b = random_group(rng, 2 + rng() % 30, 0.3, 1.5);
    for (auto model : {VarianceModel::Pooled, VarianceModel::Welch}) {
      auto r = students_t_test(a, b, model);
      auto s = students_t_test(b, a, model);
      CHECK(s.t == doctest::Approx(-r.t).epsilon(1e-12));
      CHECK(s.p == doctest::Approx(r.p).epsilon(1e-12));
      CHECK(s.effect_size == doctest::Approx(-r.effect_size).epsilon(1e-12));

      const double shift = -5.0 + 10.0 * static_cast<double>(rng() % 1000) / 1000.0;
      const double scale = 0.1 + 10.0 * static_cast<double>(rng() % 1000) / 1000.0;
      auto ta = a, tb = b;
      for (auto& x : ta) x = scale * x + shift;
      for (auto& x : tb) x = scale * x + shift;
      auto u = students_t_test(ta, tb, model);
      CHECK(u.t == doctest::Approx(r.t).epsilon(1e-9));
      CHECK(u.p == doctest::Approx(r.p).epsilon(1e-9));
      CHECK(u.df == doctest::Approx(r.df).epsilon(1e-9));
    }
  }
}

TEST_CASE("p-value agrees with quadrature of the t density") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 200; ++i) {
    const double df = 1.0 + static_cast<double>(rng() % 2000) / 10.0;
    const double t = static_cast<double>(rng() % 8000) / 1000.0 - 4.0;
    CAPTURE(t);
    CAPTURE(df);
    CHECK(std::abs(student_t_two_sided_p(t, df) - quadrature_two_sided_p(t, df)) <= 1e-8);
  }
  CHECK(student_t_two_sided_p(0.0, 5.0) == 1.0);
}

TEST_CASE("regularized incomplete beta closed forms") {
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.92, 1.0}) {
    CHECK(regularized_incomplete_beta(x, 3.0, 1.0) == doctest::Approx(std::pow(x, 3.0)).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(x, 1.0, 2.5) == doctest::Approx(1.0 - std::pow(1.0 - x, 2.5)).epsilon(1e-12));
  }
  CHECK(regularized_incomplete_beta(0.5, 7.3, 7.3) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("t-test contract") {
  std::vector<double> one{1.0}, two{1.0, 2.0}, flat{2.0, 2.0, 2.0};
  CHECK_THROWS_AS(students_t_test(one, two), ContractError);
  CHECK_THROWS_AS(students_t_test(flat, flat), ContractError);
}

TEST_CASE("inter-rater agreement") {
  std::map<std::string, std::vector<std::pair<std::string, double>>> scores{
      {"c1", {{"x", 0.2}, {"y", 0.6}}},
      {"c2", {{"x", 0.5}, {"y", 0.5}, {"z", 0.8}}},
      {"c3", {{"x", 1.0}}}};
  auto r = inter_rater_agreement(scores);
  // c1: 0.4; c2: pairs 0, 0.3, 0.3 -> 0.2.
  CHECK(r.mean_abs_diff == doctest::Approx(0.3));
  CHECK(r.items_counted == 2);
  CHECK(r.single_annotator_items == 1);
  CHECK_THROWS_AS(inter_rater_agreement({{"c1", {{"x", 0.1}}}}), ContractError);
}

TEST_CASE("mean and sample variance") {
  std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  auto mv = mean_variance(v);
  CHECK(mv.mean == 5.0);
  CHECK(mv.variance == doctest::Approx(32.0 / 7.0));
  CHECK(mv.n == 8);
  std::vector<double> single{3.0};
  CHECK(mean_variance(single).variance == 0.0);
}
