#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace playful {

enum class TheoryRoot { Relief, Incongruity, Superiority };

std::string_view to_string(TheoryRoot t);
// Matches the root ids used in taxonomy documents: relief, incongruity, superiority.
std::optional<TheoryRoot> theory_from_id(std::string_view id);

enum class NodeKind { Root, Category, Leaf };

std::string_view to_string(NodeKind k);

struct TaxonomyNode {
  std::string id;
  std::string label;
  NodeKind kind = NodeKind::Leaf;
  std::vector<std::string> parents;  // empty only for roots
};

// Humor-type DAG. Immutable once loaded; share freely between threads.
class TaxonomyGraph {
 public:
  inline static constexpr int kSchemaVersion = 1;

  // Document: first record `playful-taxonomy<TAB>1`, then one record per node:
  // id<TAB>kind<TAB>parents<TAB>label, parents comma-separated or '-'.
  // Throws ParseError / ValidationError naming the offending line.
  static TaxonomyGraph parse(std::string_view document);
  static TaxonomyGraph load(const std::filesystem::path& path);

  const std::vector<TaxonomyNode>& nodes() const { return nodes_; }
  const TaxonomyNode* find(std::string_view id) const;
  bool is_leaf(std::string_view id) const;

  std::vector<std::string> roots() const;
  std::vector<std::string> leaves() const;

  // Every theory reachable by walking parent edges up from `leaf_id`.
  // Throws NotFoundError for unknown ids and ContractError for non-leaves.
  std::set<TheoryRoot> theory_ancestors(std::string_view leaf_id) const;

 private:
  std::vector<TaxonomyNode> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace playful
