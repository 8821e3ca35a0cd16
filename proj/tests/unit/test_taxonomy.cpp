#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "playful/error.hpp"
#include "playful/taxonomy.hpp"

using namespace playful;

namespace {

std::string doc(const std::string& body) { return "playful-taxonomy\t1\n" + body; }

}  // namespace

TEST_CASE("shipped taxonomy: three roots and the eleven leaves") {
  auto g = TaxonomyGraph::load(testing::asset("taxonomy.v1"));
  auto roots = g.roots();
  std::sort(roots.begin(), roots.end());
  CHECK(roots == std::vector<std::string>{"incongruity", "relief", "superiority"});

  auto leaves = g.leaves();
  std::sort(leaves.begin(), leaves.end());
  std::vector<std::string> expected{"incongruity/impossible-for-va/out-of-scope",
                                    "incongruity/impossible-for-va/physical",
                                    "incongruity/impossible-general/illegal",
                                    "incongruity/impossible-general/physical",
                                    "incongruity/improbable/quantities",
                                    "incongruity/improbable/topics",
                                    "personification/as-human",
                                    "personification/as-robot",
                                    "relief/adult",
                                    "relief/scatological",
                                    "superiority/cultural-references"};
  CHECK(leaves == expected);

  const auto* p = g.find("personification");
  REQUIRE(p != nullptr);
  CHECK(p->kind == NodeKind::Category);
  CHECK(p->parents.size() == 2);

  for (const auto& leaf : leaves) CHECK(!g.theory_ancestors(leaf).empty());
}

TEST_CASE("theory ancestors") {
  auto g = TaxonomyGraph::load(testing::asset("taxonomy.v1"));
  CHECK(g.theory_ancestors("personification/as-human") ==
        std::set<TheoryRoot>{TheoryRoot::Incongruity, TheoryRoot::Superiority});
  CHECK(g.theory_ancestors("relief/adult") == std::set<TheoryRoot>{TheoryRoot::Relief});
  CHECK_THROWS_AS(g.theory_ancestors("relief"), ContractError);
  CHECK_THROWS_AS(g.theory_ancestors("no/such/leaf"), NotFoundError);
}

TEST_CASE("minimal document") {
  auto g = TaxonomyGraph::parse(doc("relief\troot\t-\tRelief\nrelief/x\tleaf\trelief\tX\n"));
  CHECK(g.nodes().size() == 2);
  CHECK(g.is_leaf("relief/x"));
  CHECK(!g.is_leaf("relief"));
}

TEST_CASE("invalid documents are rejected") {
  CHECK_THROWS_AS(TaxonomyGraph::parse(doc("relief\troot\t-\tRelief\nx\tleaf\tx\tX\n")), ValidationError);
  CHECK_THROWS_AS(TaxonomyGraph::parse(doc("relief\troot\t-\tRelief\n"
                                           "a\tcategory\tb\tA\nb\tcategory\ta\tB\nc\tleaf\ta\tC\n")),
                  ValidationError);
  CHECK_THROWS_AS(TaxonomyGraph::parse(doc("relief\troot\t-\tRelief\nrelief\troot\t-\tAgain\n")), ValidationError);
  // Orphan: parent never declared.
  CHECK_THROWS_AS(TaxonomyGraph::parse(doc("relief\troot\t-\tRelief\nx\tleaf\tnowhere\tX\n")), ValidationError);
  CHECK_THROWS_AS(TaxonomyGraph::parse("relief\troot\t-\tRelief\n"), ParseError);
  CHECK_THROWS_AS(TaxonomyGraph::parse("playful-taxonomy\t2\n"), ParseError);
  CHECK_THROWS_AS(TaxonomyGraph::parse(doc("relief\troot\t-\n")), ParseError);
  CHECK_THROWS_AS(TaxonomyGraph::parse(doc("relief\twidget\t-\tRelief\n")), ParseError);
}

TEST_CASE("parse errors carry the line") {
  try {
    TaxonomyGraph::parse(doc("relief\troot\t-\tRelief\nbroken line\n"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}
