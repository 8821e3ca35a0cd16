#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace playful {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

// Empty optional means the ratio is undefined (zero denominator), which is
// not the same as 0.
struct PrecisionRecall {
  std::optional<double> precision;
  std::optional<double> recall;
};

PrecisionRecall precision_recall(const ConfusionCounts& c);

// F1 when both precision and recall are defined and not both zero.
std::optional<double> f1_score(const ConfusionCounts& c);

// (raw - 1) / 6 for a 1..7 Likert answer; throws ContractError otherwise.
double normalize_likert(int raw);

enum class VarianceModel { Pooled, Welch };

struct TestResult {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double t = 0.0;   // (mean_a - mean_b) / standard error
  double df = 0.0;
  double p = 1.0;   // two-sided
  double effect_size = 0.0;  // mean_b - mean_a
};

// Two-sample t-test. Pooled variance (Student) by default; Welch for
// sensitivity checks. Throws ContractError when a group has fewer than two
// values or the variance is zero.
TestResult students_t_test(std::span<const double> group_a, std::span<const double> group_b,
                           VarianceModel model = VarianceModel::Pooled);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double x, double a, double b);

// P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct AgreementReport {
  double mean_abs_diff = 0.0;  // mean over multi-annotated items
  std::size_t items_counted = 0;
  std::size_t single_annotator_items = 0;
};

// item -> (annotator, normalized score in [0, 1]). Per item: mean absolute
// difference over all annotator pairs. Throws ContractError if no item has two
// or more annotators.
AgreementReport inter_rater_agreement(
    const std::map<std::string, std::vector<std::pair<std::string, double>>>& scores);

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;  // sample variance (n - 1); 0 for a single value
  std::size_t n = 0;
};

MeanVariance mean_variance(std::span<const double> values);

}  // namespace playful
