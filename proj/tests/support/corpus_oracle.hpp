#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "playful/corpus.hpp"

namespace testing {

// Expected negative word-count histogram, derived from counts alone:
// every bucket first draws from itself; each missing unit then borrows from
// the nearest bucket with items left (lower bucket on ties), shortfalls
// handled in ascending word count. Returns the deficits instead when the
// pool runs dry.
struct SpillOutcome {
  std::map<std::size_t, std::size_t> negatives;
  std::map<std::size_t, std::size_t> deficits;
};

inline SpillOutcome expected_spill(const std::map<std::size_t, std::size_t>& demand,
                                   std::map<std::size_t, std::size_t> supply) {
  SpillOutcome out;
  std::map<std::size_t, std::size_t> missing;
  for (auto [k, want] : demand) {
    std::size_t have = supply.count(k) ? supply[k] : 0;
    std::size_t own = want < have ? want : have;
    supply[k] = have - own;
    if (own) out.negatives[k] += own;
    if (want > own) missing[k] = want - own;
  }
  for (auto [k, n] : missing) {
    for (std::size_t unit = 0; unit < n; ++unit) {
      std::optional<std::size_t> best;
      for (auto [j, left] : supply) {
        if (left == 0) continue;
        std::size_t dist = j > k ? j - k : k - j;
        std::size_t best_dist = best ? (*best > k ? *best - k : k - *best) : ~std::size_t{0};
        if (dist < best_dist) best = j;  // ascending scan keeps the lower bucket on ties
      }
      if (!best) {
        ++out.deficits[k];
        continue;
      }
      --supply[*best];
      ++out.negatives[*best];
    }
  }
  return out;
}

inline std::string words(std::size_t n, const std::string& stem, std::size_t salt) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + stem + std::to_string(salt) + "x" + std::to_string(i);
  return s;
}

struct RandomPool {
  std::vector<playful::LabeledExample> positives;
  std::vector<playful::LabeledExample> pool;
};

// Positives and a negative pool with random word-count profiles; roughly a
// tenth of configurations cannot be covered.
inline RandomPool random_pool(std::mt19937_64& rng) {
  RandomPool r;
  const std::size_t max_words = 2 + rng() % 10;
  const std::size_t n_pos = 1 + rng() % 60;
  for (std::size_t i = 0; i < n_pos; ++i)
    r.positives.push_back({words(1 + rng() % max_words, "p", i), playful::Label::Positive, playful::Source::Synthetic});
  const std::size_t n_pool = n_pos / 2 + rng() % (2 * n_pos + 10);
  for (std::size_t i = 0; i < n_pool; ++i)
    r.pool.push_back({words(1 + rng() % (max_words + 3), "n", i), playful::Label::Negative,
                      playful::Source::SampledTraffic});
  return r;
}

}  // namespace testing
