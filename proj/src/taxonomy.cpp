#include "playful/taxonomy.hpp"

#include <algorithm>
#include <functional>

#include "detail/io.hpp"
#include "playful/error.hpp"

namespace playful {

std::string_view to_string(TheoryRoot t) {
  switch (t) {
    case TheoryRoot::Relief: return "relief";
    case TheoryRoot::Incongruity: return "incongruity";
    case TheoryRoot::Superiority: return "superiority";
  }
  return "?";
}

std::optional<TheoryRoot> theory_from_id(std::string_view id) {
  if (id == "relief") return TheoryRoot::Relief;
  if (id == "incongruity") return TheoryRoot::Incongruity;
  if (id == "superiority") return TheoryRoot::Superiority;
  return std::nullopt;
}

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Root: return "root";
    case NodeKind::Category: return "category";
    case NodeKind::Leaf: return "leaf";
  }
  return "?";
}

namespace {

NodeKind parse_kind(const std::string& s, std::size_t line) {
  if (s == "root") return NodeKind::Root;
  if (s == "category") return NodeKind::Category;
  if (s == "leaf") return NodeKind::Leaf;
  throw ParseError("unknown node kind '" + s + "'", line);
}

}  // namespace

TaxonomyGraph TaxonomyGraph::parse(std::string_view document) {
  TaxonomyGraph g;
  std::vector<std::size_t> lines;
  bool saw_header = false;

  detail::for_each_record(document, [&](std::size_t line, const std::vector<std::string>& f) {
    if (!saw_header) {
      if (f.size() != 2 || f[0] != "playful-taxonomy")
        throw ParseError("missing 'playful-taxonomy<TAB>version' header", line);
      if (detail::parse_int(f[1], line) != kSchemaVersion)
        throw ParseError("unsupported taxonomy schema version " + f[1], line);
      saw_header = true;
      return;
    }
    if (f.size() != 4) throw ParseError("expected id<TAB>kind<TAB>parents<TAB>label", line);
    TaxonomyNode node;
    node.id = f[0];
    node.kind = parse_kind(f[1], line);
    node.label = f[3];
    if (node.id.empty()) throw ParseError("empty node id", line);
    if (f[2] != "-" && !f[2].empty()) {
      for (auto& p : detail::split(f[2], ',')) {
        auto id = std::string(detail::trim(p));
        if (id.empty()) throw ParseError("empty parent id", line);
        node.parents.push_back(std::move(id));
      }
    }
    std::sort(node.parents.begin(), node.parents.end());
    if (std::adjacent_find(node.parents.begin(), node.parents.end()) != node.parents.end())
      throw ValidationError("node '" + node.id + "' lists a parent twice (line " + std::to_string(line) + ")");
    if (g.index_.contains(node.id))
      throw ValidationError("duplicate node id '" + node.id + "' (line " + std::to_string(line) + ")");
    g.index_.emplace(node.id, g.nodes_.size());
    g.nodes_.push_back(std::move(node));
    lines.push_back(line);
  });
  if (!saw_header) throw ParseError("empty taxonomy document");

  auto at = [&](std::size_t i) { return " (line " + std::to_string(lines[i]) + ")"; };

  for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
    const auto& n = g.nodes_[i];
    if (n.kind == NodeKind::Root) {
      if (!n.parents.empty()) throw ValidationError("root '" + n.id + "' must not have parents" + at(i));
      if (!theory_from_id(n.id))
        throw ValidationError("root '" + n.id + "' is not one of relief, incongruity, superiority" + at(i));
      continue;
    }
    if (n.parents.empty()) throw ValidationError("orphan node '" + n.id + "' has no parent" + at(i));
    for (const auto& p : n.parents) {
      auto it = g.index_.find(p);
      if (it == g.index_.end())
        throw ValidationError("orphan node '" + n.id + "': parent '" + p + "' is not defined" + at(i));
    }
  }

  // Cycle check over parent edges: 0 = unvisited, 1 = on stack, 2 = done.
  std::vector<int> state(g.nodes_.size(), 0);
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    state[i] = 1;
    for (const auto& p : g.nodes_[i].parents) {
      std::size_t j = g.index_.at(p);
      if (state[j] == 1) throw ValidationError("cycle detected through node '" + g.nodes_[i].id + "'" + at(i));
      if (state[j] == 0) visit(j);
    }
    state[i] = 2;
  };
  for (std::size_t i = 0; i < g.nodes_.size(); ++i)
    if (state[i] == 0) visit(i);

  for (std::size_t i = 0; i < g.nodes_.size(); ++i)
    for (const auto& p : g.nodes_[i].parents)
      if (g.nodes_[g.index_.at(p)].kind == NodeKind::Leaf)
        throw ValidationError("node '" + g.nodes_[i].id + "' has leaf '" + p + "' as parent" + at(i));

  return g;
}

TaxonomyGraph TaxonomyGraph::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path));
}

const TaxonomyNode* TaxonomyGraph::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

bool TaxonomyGraph::is_leaf(std::string_view id) const {
  const auto* n = find(id);
  return n != nullptr && n->kind == NodeKind::Leaf;
}

std::vector<std::string> TaxonomyGraph::roots() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_)
    if (n.kind == NodeKind::Root) out.push_back(n.id);
  return out;
}

std::vector<std::string> TaxonomyGraph::leaves() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_)
    if (n.kind == NodeKind::Leaf) out.push_back(n.id);
  return out;
}

std::set<TheoryRoot> TaxonomyGraph::theory_ancestors(std::string_view leaf_id) const {
  const auto* leaf = find(leaf_id);
  if (leaf == nullptr) throw NotFoundError("unknown taxonomy node '" + std::string(leaf_id) + "'");
  if (leaf->kind != NodeKind::Leaf) throw ContractError("'" + std::string(leaf_id) + "' is not a leaf");

  std::set<TheoryRoot> out;
  std::vector<const TaxonomyNode*> stack{leaf};
  while (!stack.empty()) {
    const auto* n = stack.back();
    stack.pop_back();
    if (n->kind == NodeKind::Root) out.insert(*theory_from_id(n->id));
    for (const auto& p : n->parents) stack.push_back(find(p));
  }
  return out;
}

}  // namespace playful
