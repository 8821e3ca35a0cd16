#include "playful/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "playful/error.hpp"

namespace playful {

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

PrecisionRecall precision_recall(const ConfusionCounts& c) {
  PrecisionRecall pr;
  if (c.tp + c.fp > 0) pr.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) pr.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return pr;
}

std::optional<double> f1_score(const ConfusionCounts& c) {
  auto pr = precision_recall(c);
  if (!pr.precision || !pr.recall || *pr.precision + *pr.recall == 0.0) return std::nullopt;
  return 2.0 * *pr.precision * *pr.recall / (*pr.precision + *pr.recall);
}

double normalize_likert(int raw) {
  if (raw < 1 || raw > 7) throw ContractError("Likert answer out of range 1..7: " + std::to_string(raw));
  return static_cast<double>(raw - 1) / 6.0;
}

namespace {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a, b) with y = 1 - x supplied by the caller so that x close to 1 does
// not lose precision.
double ibeta(double x, double y, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(y, b, a) / b;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0))
    throw ContractError("regularized_incomplete_beta: require a, b > 0 and 0 <= x <= 1");
  return ibeta(x, 1.0 - x, a, b);
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw ContractError("student_t_two_sided_p: df must be positive");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double t2 = t * t;
  // x = df / (df + t^2), 1 - x = t^2 / (df + t^2), both computed directly.
  const double p = ibeta(df / (df + t2), t2 / (df + t2), df / 2.0, 0.5);
  return std::clamp(p, 0.0, 1.0);
}

MeanVariance mean_variance(std::span<const double> values) {
  MeanVariance mv;
  mv.n = values.size();
  if (values.empty()) return mv;
  double sum = 0.0;
  for (double v : values) sum += v;
  mv.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - mv.mean) * (v - mv.mean);
    mv.variance = ss / static_cast<double>(values.size() - 1);
  }
  return mv;
}

TestResult students_t_test(std::span<const double> group_a, std::span<const double> group_b,
                           VarianceModel model) {
  if (group_a.size() < 2 || group_b.size() < 2)
    throw ContractError("t-test needs at least two values per group");
  const auto a = mean_variance(group_a);
  const auto b = mean_variance(group_b);
  const double na = static_cast<double>(a.n);
  const double nb = static_cast<double>(b.n);

  TestResult r;
  r.mean_a = a.mean;
  r.mean_b = b.mean;
  r.effect_size = b.mean - a.mean;

  double se = 0.0;
  if (model == VarianceModel::Pooled) {
    r.df = na + nb - 2.0;
    const double pooled = ((na - 1.0) * a.variance + (nb - 1.0) * b.variance) / r.df;
    if (!(pooled > 0.0)) throw ContractError("t-test: pooled variance is zero");
    se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  } else {
    const double va = a.variance / na;
    const double vb = b.variance / nb;
    if (!(va + vb > 0.0)) throw ContractError("t-test: both groups have zero variance");
    se = std::sqrt(va + vb);
    r.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  }
  r.t = (a.mean - b.mean) / se;
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

AgreementReport inter_rater_agreement(
    const std::map<std::string, std::vector<std::pair<std::string, double>>>& scores) {
  AgreementReport rep;
  double total = 0.0;
  for (const auto& [item, ratings] : scores) {
    for (const auto& [annotator, s] : ratings)
      if (!(s >= 0.0 && s <= 1.0))
        throw ContractError("agreement: score for item '" + item + "' by '" + annotator + "' outside [0,1]");
    if (ratings.size() < 2) {
      if (ratings.size() == 1) ++rep.single_annotator_items;
      continue;
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < ratings.size(); ++i)
      for (std::size_t j = i + 1; j < ratings.size(); ++j) {
        sum += std::fabs(ratings[i].second - ratings[j].second);
        ++pairs;
      }
    total += sum / static_cast<double>(pairs);
    ++rep.items_counted;
  }
  if (rep.items_counted == 0) throw ContractError("agreement: no item has two or more annotators");
  rep.mean_abs_diff = total / static_cast<double>(rep.items_counted);
  return rep;
}

}  // namespace playful
