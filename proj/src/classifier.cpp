#include "playful/classifier.hpp"

#include <chrono>
#include <cmath>
#include <cstring>

#include <zlib.h>

#include "detail/io.hpp"
#include "detail/rng.hpp"

namespace playful {

void TrainingConfig::validate() const {
  if (epochs < 1) throw ContractError("epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ContractError("learning rate must be > 0");
  if (batch_size < 1) throw ContractError("batch size must be >= 1");
  if (max_chars < 1) throw ContractError("max chars must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ContractError("threshold must lie in (0, 1)");
}

namespace head {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double score(std::span<const double> weights, double bias, std::span<const double> x) {
  if (weights.size() != x.size()) throw ContractError("head input has wrong dimension");
  double z = bias;
  for (std::size_t i = 0; i < x.size(); ++i) z += weights[i] * x[i];
  return z;
}

namespace {
// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
}  // namespace

LossGradient loss_and_gradient(std::span<const double> weights, double bias,
                               std::span<const std::vector<double>> inputs, std::span<const int> labels) {
  if (inputs.size() != labels.size() || inputs.empty()) throw ContractError("batch is empty or mislabeled");
  LossGradient g;
  g.d_weights.assign(weights.size(), 0.0);
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const double z = score(weights, bias, inputs[n]);
    const double y = labels[n];
    // BCE(y, sigmoid(z)) = softplus(z) - y z.
    g.loss += softplus(z) - y * z;
    const double err = sigmoid(z) - y;
    for (std::size_t i = 0; i < weights.size(); ++i) g.d_weights[i] += err * inputs[n][i];
    g.d_bias += err;
  }
  const double inv = 1.0 / static_cast<double>(inputs.size());
  g.loss *= inv;
  g.d_bias *= inv;
  for (double& d : g.d_weights) d *= inv;
  return g;
}

}  // namespace head

namespace {

void check_provider(const Model& model, const ProviderConfig& provider) {
  const auto info = provider_info(provider);
  if (info.provider_id != model.provider_id)
    throw ContractError("provider mismatch: model was trained with '" + model.provider_id + "', got '" +
                        info.provider_id + "'");
  if (info.dim != model.embedding_dim()) throw ContractError("provider dim does not match model weights");
}

std::vector<double> raw_input(std::string_view text, std::size_t max_chars, const ProviderConfig& provider,
                              const Lexicons& lex) {
  auto emb = embed(truncate_chars(text, max_chars), provider);
  if (emb.values.size() != provider.dim) throw ContractError("embedding has wrong dimension");
  auto feats = extract_features(text, lex).to_array();
  std::vector<double> x = std::move(emb.values);
  x.insert(x.end(), feats.begin(), feats.end());
  return x;
}

void standardize(std::vector<double>& x, const Model& model) {
  const std::size_t off = x.size() - kFeatureDim;
  if (!model.embedding_means.empty())
    for (std::size_t d = 0; d < off; ++d) x[d] = (x[d] - model.embedding_means[d]) / model.embedding_stds[d];
  for (std::size_t k = 0; k < kFeatureDim; ++k)
    x[off + k] = (x[off + k] - model.feature_means[k]) / model.feature_stds[k];
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::vector<double> model_input(const Model& model, std::string_view text, const ProviderConfig& provider,
                                const Lexicons& lex) {
  auto x = raw_input(text, model.config.max_chars, provider, lex);
  standardize(x, model);
  return x;
}

Model train(const Corpus& corpus, const TrainingConfig& cfg, const ProviderConfig& provider, const Lexicons& lex,
            const TrainOptions& options) {
  cfg.validate();
  if (corpus.split.size() != corpus.examples.size()) throw ContractError("corpus split tags missing");

  std::vector<std::size_t> train_idx;
  for (std::size_t i = 0; i < corpus.examples.size(); ++i)
    if (corpus.split[i] == Split::Train) train_idx.push_back(i);
  if (train_idx.empty()) throw ContractError("corpus has no training examples");

  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  xs.reserve(train_idx.size());
  for (std::size_t n = 0; n < train_idx.size(); ++n) {
    const auto& ex = corpus.examples[train_idx[n]];
    try {
      xs.push_back(raw_input(ex.text, cfg.max_chars, provider, lex));
    } catch (const TransportError& e) {
      throw TrainingAborted("training aborted: embedding provider failed after " + std::to_string(n) + " of " +
                                std::to_string(train_idx.size()) + " examples: " + e.what(),
                            n, train_idx.size());
    }
    ys.push_back(ex.label == Label::Positive ? 1 : 0);
  }

  Model model;
  model.provider_id = provider_info(provider).provider_id;
  model.config = cfg;
  model.trained_at_ms = options.trained_at_ms.value_or(now_ms());
  const std::size_t dim = provider.dim + kFeatureDim;
  model.weights.assign(dim, 0.0);

  // Train-split z-scoring of every input coordinate.
  const double n = static_cast<double>(xs.size());
  auto moments = [&](std::size_t d) {
    double sum = 0.0;
    for (const auto& x : xs) sum += x[d];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& x : xs) ss += (x[d] - mean) * (x[d] - mean);
    return std::pair{mean, std::sqrt(ss / n)};
  };
  model.embedding_means.resize(provider.dim);
  model.embedding_stds.resize(provider.dim);
  for (std::size_t d = 0; d < provider.dim; ++d) {
    auto [mean, sd] = moments(d);
    model.embedding_means[d] = mean;
    model.embedding_stds[d] = sd > 1e-12 ? sd : 1.0;
  }
  for (std::size_t k = 0; k < kFeatureDim; ++k) {
    auto [mean, sd] = moments(provider.dim + k);
    model.feature_means[k] = mean;
    model.zero_variance[k] = !(sd > 1e-12);
    model.feature_stds[k] = model.zero_variance[k] ? 1.0 : sd;
  }
  for (auto& x : xs) standardize(x, model);

  detail::Rng rng(cfg.seed);
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::vector<double>> batch_x;
  std::vector<int> batch_y;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch_x.clear();
      batch_y.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch_x.push_back(xs[order[i]]);
        batch_y.push_back(ys[order[i]]);
      }
      auto g = head::loss_and_gradient(model.weights, model.bias, batch_x, batch_y);
      if (!std::isfinite(g.loss))
        throw Error("training aborted: non-finite loss in epoch " + std::to_string(epoch + 1) + ", batch " +
                    std::to_string(batches + 1));
      for (std::size_t i = 0; i < dim; ++i) model.weights[i] -= cfg.learning_rate * g.d_weights[i];
      model.bias -= cfg.learning_rate * g.d_bias;
      epoch_loss += g.loss;
      ++batches;
    }
    if (options.on_epoch) options.on_epoch(epoch + 1, epoch_loss / static_cast<double>(batches));
  }
  return model;
}

Prediction predict(const Model& model, std::string_view text, const ProviderConfig& provider, const Lexicons& lex) {
  check_provider(model, provider);
  const auto x = model_input(model, text, provider, lex);
  Prediction p;
  p.threshold = model.config.threshold;
  p.probability = head::sigmoid(head::score(model.weights, model.bias, x));
  p.is_personifying = p.probability >= p.threshold;
  return p;
}

ConfusionCounts evaluate(const Model& model, std::span<const LabeledExample> testset, const ProviderConfig& provider,
                         const Lexicons& lex) {
  if (testset.empty()) throw ContractError("evaluate: empty test set");
  check_provider(model, provider);
  ConfusionCounts c;
  for (const auto& ex : testset) {
    const bool predicted = predict(model, ex.text, provider, lex).is_personifying;
    const bool actual = ex.label == Label::Positive;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

// ---- serialization ----

namespace {

constexpr char kMagic[8] = {'P', 'L', 'Y', 'M', 'O', 'D', 'E', 'L'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::string& data() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw ParseError("model file truncated");
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc(std::string_view data) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

}  // namespace

std::string save_model(const Model& m) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kModelFormatVersion);
  w.str(m.provider_id);
  w.u64(m.weights.size());
  for (double x : m.weights) w.f64(x);
  w.f64(m.bias);
  for (double x : m.feature_means) w.f64(x);
  for (double x : m.feature_stds) w.f64(x);
  for (bool b : m.zero_variance) w.u8(b ? 1 : 0);
  w.u64(m.embedding_means.size());
  for (double x : m.embedding_means) w.f64(x);
  for (double x : m.embedding_stds) w.f64(x);
  w.u64(static_cast<std::uint64_t>(m.trained_at_ms));
  w.u32(static_cast<std::uint32_t>(m.config.epochs));
  w.f64(m.config.learning_rate);
  w.u64(m.config.batch_size);
  w.u64(m.config.max_chars);
  w.f64(m.config.threshold);
  w.u64(m.config.seed);
  w.u32(crc(w.data()));
  return std::move(w.data());
}

Model load_model(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic + 8 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw ParseError("not a model file");
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  Reader trailer(bytes.substr(bytes.size() - 4));
  if (trailer.u32() != crc(body)) throw ValidationError("model file checksum mismatch");

  Reader r(body);
  for (std::size_t i = 0; i < sizeof kMagic; ++i) r.u8();
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion)
    throw ParseError("unknown model format version " + std::to_string(version));

  Model m;
  m.provider_id = r.str();
  const std::uint64_t n = r.u64();
  if (n < kFeatureDim || n > (1u << 24)) throw ParseError("model weight count out of range");
  m.weights.resize(n);
  for (auto& x : m.weights) x = r.f64();
  m.bias = r.f64();
  for (auto& x : m.feature_means) x = r.f64();
  for (auto& x : m.feature_stds) x = r.f64();
  for (auto& b : m.zero_variance) b = r.u8() != 0;
  const std::uint64_t e = r.u64();
  if (e != 0 && e != n - kFeatureDim) throw ParseError("embedding statistics do not match weight count");
  m.embedding_means.resize(e);
  m.embedding_stds.resize(e);
  for (auto& x : m.embedding_means) x = r.f64();
  for (auto& x : m.embedding_stds) x = r.f64();
  m.trained_at_ms = static_cast<std::int64_t>(r.u64());
  m.config.epochs = static_cast<int>(r.u32());
  m.config.learning_rate = r.f64();
  m.config.batch_size = r.u64();
  m.config.max_chars = r.u64();
  m.config.threshold = r.f64();
  m.config.seed = r.u64();
  if (!r.done()) throw ParseError("trailing bytes in model file");
  for (double s : m.feature_stds)
    if (!(s > 0.0)) throw ValidationError("model has non-positive feature std");
  for (double s : m.embedding_stds)
    if (!(s > 0.0)) throw ValidationError("model has non-positive embedding std");
  return m;
}

void save_model_file(const Model& model, const std::filesystem::path& path) {
  detail::write_file(path, save_model(model));
}

Model load_model_file(const std::filesystem::path& path) { return load_model(detail::read_file(path)); }

}  // namespace playful
