#include "playful/embedding.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "playful/error.hpp"

namespace playful {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

// Byte offsets where each code point starts, plus a final end offset.
std::vector<std::size_t> codepoint_offsets(std::string_view s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!is_continuation(static_cast<unsigned char>(s[i]))) out.push_back(i);
  out.push_back(s.size());
  return out;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

EmbeddingVector embed_baseline(std::string_view text, const ProviderConfig& cfg) {
  EmbeddingVector v;
  v.provider_id = provider_info(cfg).provider_id;
  v.values.assign(cfg.dim, 0.0);

  const std::string s = ascii_lower(truncate_chars(text, cfg.truncation));
  const auto offs = codepoint_offsets(s);
  const std::size_t chars = offs.size() - 1;
  for (std::size_t n = cfg.ngram_range.min; n <= cfg.ngram_range.max; ++n) {
    for (std::size_t i = 0; i + n <= chars; ++i) {
      const std::uint64_t h = fnv1a64(std::string_view(s).substr(offs[i], offs[i + n] - offs[i]));
      const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
      v.values[h % cfg.dim] += sign;
    }
  }
  double norm = 0.0;
  for (double x : v.values) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& x : v.values) x /= norm;
  return v;
}

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

EmbeddingVector embed_external(std::string_view text, const ProviderConfig& cfg) {
  const auto ep = split_endpoint(cfg.endpoint);
  const std::string body = nlohmann::json{{"text", truncate_chars(text, cfg.truncation)}}.dump();
  std::string last_error = "no attempts made";

  for (int attempt = 0; attempt < std::max(cfg.max_attempts, 1); ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(cfg.backoff * (1 << (attempt - 1)));
    httplib::Client client(ep.origin);
    const auto secs = cfg.timeout.count() / 1000;
    const auto usecs = (cfg.timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    auto res = client.Post(ep.path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw ContractError("encoder returned HTTP " + std::to_string(res->status));

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ContractError(std::string("encoder response is not JSON: ") + e.what());
    }
    if (!j.contains("vector") || !j["vector"].is_array()) throw ContractError("encoder response lacks 'vector'");
    EmbeddingVector v;
    v.provider_id = provider_info(cfg).provider_id;
    for (const auto& x : j["vector"]) {
      if (!x.is_number()) throw ContractError("encoder vector holds a non-number");
      v.values.push_back(x.get<double>());
      if (!std::isfinite(v.values.back())) throw ContractError("encoder vector holds a non-finite value");
    }
    if (v.values.size() != cfg.dim)
      throw ContractError("encoder returned dim " + std::to_string(v.values.size()) + ", expected " +
                          std::to_string(cfg.dim));
    return v;
  }
  throw TransportError("encoder at " + cfg.endpoint + " unreachable after " +
                       std::to_string(std::max(cfg.max_attempts, 1)) + " attempts: " + last_error);
}

}  // namespace

ProviderConfig ProviderConfig::baseline(std::size_t dim, NgramRange ngrams) {
  ProviderConfig cfg;
  cfg.dim = dim;
  cfg.ngram_range = ngrams;
  return cfg;
}

ProviderConfig ProviderConfig::external(std::string endpoint, std::size_t dim) {
  ProviderConfig cfg;
  cfg.kind = Kind::External;
  cfg.endpoint = std::move(endpoint);
  cfg.dim = dim;
  return cfg;
}

ProviderInfo provider_info(const ProviderConfig& cfg) {
  if (cfg.kind == ProviderConfig::Kind::External) {
    std::string id = "external:" + cfg.endpoint;
    if (cfg.truncation != 128) id += "#t" + std::to_string(cfg.truncation);
    return {id, cfg.dim};
  }
  std::string id = "baseline-ngram/v1-" + std::to_string(cfg.dim);
  if (cfg.ngram_range != NgramRange{})
    id += "-n" + std::to_string(cfg.ngram_range.min) + "-" + std::to_string(cfg.ngram_range.max);
  if (cfg.truncation != 128) id += "-t" + std::to_string(cfg.truncation);
  return {id, cfg.dim};
}

EmbeddingVector embed(std::string_view text, const ProviderConfig& cfg) {
  if (cfg.dim == 0) throw ContractError("embedding dim must be positive");
  if (cfg.kind == ProviderConfig::Kind::External) return embed_external(text, cfg);
  if (cfg.ngram_range.min == 0 || cfg.ngram_range.min > cfg.ngram_range.max)
    throw ContractError("invalid n-gram range");
  return embed_baseline(text, cfg);
}

std::string truncate_chars(std::string_view text, std::size_t max_chars) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_continuation(static_cast<unsigned char>(text[i]))) continue;
    if (seen == max_chars) return std::string(text.substr(0, i));
    ++seen;
  }
  return std::string(text);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace playful
