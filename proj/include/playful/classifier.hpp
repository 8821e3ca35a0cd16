#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "playful/corpus.hpp"
#include "playful/embedding.hpp"
#include "playful/error.hpp"
#include "playful/stats.hpp"
#include "playful/text_features.hpp"

namespace playful {

struct TrainingConfig {
  int epochs = 3;
  double learning_rate = 5e-5;
  std::size_t batch_size = 32;
  std::size_t max_chars = 128;
  double threshold = 0.5;
  std::uint64_t seed = 0;

  // Throws ContractError on out-of-range values.
  void validate() const;
  bool operator==(const TrainingConfig&) const = default;
};

// Dense sigmoid head over the standardized [embedding || features] vector.
struct Model {
  std::vector<double> weights;  // embedding dim + kFeatureDim
  double bias = 0.0;
  std::array<double, kFeatureDim> feature_means{};
  std::array<double, kFeatureDim> feature_stds{};
  // Features with zero variance on the train split; stored std is 1.
  std::array<bool, kFeatureDim> zero_variance{};
  // Per-coordinate embedding standardization, same convention (std 1 when
  // the bucket never varies). Empty means the embedding is used as is.
  std::vector<double> embedding_means;
  std::vector<double> embedding_stds;
  std::string provider_id;
  std::int64_t trained_at_ms = 0;  // Unix epoch milliseconds
  TrainingConfig config;

  std::size_t embedding_dim() const { return weights.size() - kFeatureDim; }
  bool operator==(const Model&) const = default;
};

struct Prediction {
  double probability = 0.0;
  bool is_personifying = false;
  double threshold = 0.5;
};

// Provider failed while embedding the corpus; reports how far training got.
class TrainingAborted : public Error {
 public:
  TrainingAborted(const std::string& what, std::size_t completed, std::size_t total)
      : Error(what), completed_(completed), total_(total) {}
  std::size_t completed() const { return completed_; }
  std::size_t total() const { return total_; }

 private:
  std::size_t completed_;
  std::size_t total_;
};

struct TrainOptions {
  // Timestamp stamped into the model; nullopt means the current time.
  std::optional<std::int64_t> trained_at_ms;
  // Called after each epoch with (epoch, mean training loss).
  std::function<void(int, double)> on_epoch;
};

// Mini-batch gradient descent on binary cross-entropy over the train split.
// Standardization statistics (embedding and features) come from the train
// split only. Bit-identical
// output for identical inputs and seed.
Model train(const Corpus& corpus, const TrainingConfig& cfg, const ProviderConfig& provider,
            const Lexicons& lex, const TrainOptions& options = {});

// Throws ContractError when the provider's id differs from the model's.
Prediction predict(const Model& model, std::string_view text, const ProviderConfig& provider, const Lexicons& lex);

// Confusion counts at the model threshold. Throws ContractError on an empty set.
ConfusionCounts evaluate(const Model& model, std::span<const LabeledExample> testset,
                         const ProviderConfig& provider, const Lexicons& lex);

// Versioned little-endian binary with a trailing CRC-32.
std::string save_model(const Model& model);
// Throws ValidationError on checksum mismatch, ParseError on unknown version
// or truncated data.
Model load_model(std::string_view bytes);
void save_model_file(const Model& model, const std::filesystem::path& path);
Model load_model_file(const std::filesystem::path& path);

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Head math, exposed for gradient checking.
namespace head {

double sigmoid(double z);
double score(std::span<const double> weights, double bias, std::span<const double> x);

struct LossGradient {
  double loss = 0.0;  // mean binary cross-entropy
  std::vector<double> d_weights;
  double d_bias = 0.0;
};

// Mean BCE over the batch and its gradient; labels are 0 or 1.
LossGradient loss_and_gradient(std::span<const double> weights, double bias,
                               std::span<const std::vector<double>> inputs, std::span<const int> labels);

}  // namespace head

// Head input for one text: embedding of the first max_chars characters,
// then features of the full text, every coordinate z-scored.
std::vector<double> model_input(const Model& model, std::string_view text, const ProviderConfig& provider,
                                const Lexicons& lex);

}  // namespace playful
