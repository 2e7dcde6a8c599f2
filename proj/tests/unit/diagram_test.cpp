#include <doctest.h>

#include <random>

#include "actdiag/diagram.hpp"
#include "actdiag/errors.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

using namespace actdiag;

namespace {

ActivityDiagram chain3() {
  return ActivityDiagram({{"a", NodeKind::Action, "A"}, {"b", NodeKind::Action, "B"}, {"c", NodeKind::Action, "C"}},
                         {{"a", "b", std::nullopt}, {"b", "c", std::nullopt}});
}

std::vector<std::string> target_ids(const std::vector<Successor>& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.node->id);
  return out;
}

}  // namespace

TEST_CASE("node kinds round-trip through their tokens") {
  for (auto k : {NodeKind::Action, NodeKind::Decision, NodeKind::Initial, NodeKind::End}) {
    CHECK(parse_node_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_node_kind("fork").has_value());
  CHECK_FALSE(parse_node_kind("Action").has_value());
}

TEST_CASE("construction defaults and storage order") {
  ActivityDiagram ad({{"z", NodeKind::End, ""}, {"a", NodeKind::Initial, ""}, {"m", NodeKind::Action, "do"}},
                     {{"m", "z", std::string("")}, {"a", "m", std::nullopt}});
  CHECK(ad.node("a").label == "start");
  CHECK(ad.node("z").label == "end");
  CHECK(ad.nodes().front().id == "a");
  CHECK(ad.transitions().front().source == "a");
  CHECK_FALSE(ad.transitions().back().label.has_value());

  ActivityDiagram same({{"m", NodeKind::Action, "do"}, {"a", NodeKind::Initial, "start"}, {"z", NodeKind::End, "end"}},
                       {{"a", "m", std::nullopt}, {"m", "z", std::nullopt}});
  CHECK(ad == same);
}

TEST_CASE("construction rejects malformed diagrams") {
  CHECK_THROWS_AS(ActivityDiagram({{"", NodeKind::Action, "x"}}, {}), DiagramError);
  CHECK_THROWS_AS(ActivityDiagram({{"a", NodeKind::Action, ""}}, {}), DiagramError);
  CHECK_THROWS_AS(ActivityDiagram({{"d", NodeKind::Decision, ""}}, {}), DiagramError);
  CHECK_THROWS_AS(ActivityDiagram({{"a", NodeKind::Action, "x"}, {"a", NodeKind::End, ""}}, {}), DiagramError);
  CHECK_THROWS_AS(ActivityDiagram({{"a", NodeKind::Action, "x"}}, {{"a", "b", std::nullopt}}), DiagramError);
  CHECK_THROWS_AS(ActivityDiagram({{"a", NodeKind::Action, "x"}}, {{"q", "a", std::nullopt}}), DiagramError);
  CHECK_THROWS_AS(ActivityDiagram({{"a", NodeKind::Action, "x"}, {"b", NodeKind::Action, "y"}},
                                  {{"a", "b", std::nullopt}, {"a", "b", std::nullopt}}),
                  DiagramError);
  // Same endpoints with different labels are distinct transitions.
  CHECK_NOTHROW(ActivityDiagram({{"a", NodeKind::Action, "x"}, {"b", NodeKind::Action, "y"}},
                                {{"a", "b", std::nullopt}, {"a", "b", std::string("[g]")}}));
}

TEST_CASE("lookups and degrees") {
  auto ad = chain3();
  CHECK(ad.contains("b"));
  CHECK_FALSE(ad.contains("q"));
  CHECK(ad.index_of("c") == 2);
  CHECK(ad.in_degree("a") == 0);
  CHECK(ad.out_degree("a") == 1);
  CHECK(ad.in_degree("c") == 1);
  CHECK_THROWS_AS(ad.node("q"), NodeNotFound);
  CHECK_THROWS_WITH_AS(ad.index_of("q"), "node not found: q", NodeNotFound);
}

TEST_CASE("successors") {
  SUBCASE("decision n2 of the stuck-program diagram") {
    auto ad = testsupport::fixture("stuck_truth.csv");
    auto s = successors(ad, "n2");
    REQUIRE(s.size() == 2);
    CHECK(s[0].node->id == "n3");
    CHECK(s[0].transition->label == "[soft-restart possible]");
    CHECK(s[1].node->id == "n4");
    CHECK(s[1].transition->label == "[soft-restart not possible]");
  }
  SUBCASE("isolated end node") {
    ActivityDiagram ad({{"e", NodeKind::End, ""}}, {});
    CHECK(successors(ad, "e").empty());
  }
  SUBCASE("chain head") {
    auto s = successors(chain3(), "a");
    REQUIRE(s.size() == 1);
    CHECK(s[0].node->id == "b");
    CHECK_FALSE(s[0].transition->label.has_value());
  }
  SUBCASE("ordered by target then label") {
    ActivityDiagram ad({{"d", NodeKind::Decision, "d"}, {"x", NodeKind::Action, "x"}, {"b", NodeKind::Action, "b"}},
                       {{"d", "x", std::string("[2]")}, {"d", "x", std::string("[1]")}, {"d", "b", std::string("[3]")}});
    auto s = successors(ad, "d");
    CHECK(target_ids(s) == std::vector<std::string>{"b", "x", "x"});
    CHECK(s[1].transition->label == "[1]");
  }
  SUBCASE("unknown node") { CHECK_THROWS_WITH_AS(successors(chain3(), "zz"), "node not found: zz", NodeNotFound); }
}

TEST_CASE("reachable_from") {
  auto ad = testsupport::fixture("stuck_truth.csv");
  CHECK(reachable_from(ad, "n1").size() == 11);

  ActivityDiagram single({{"a", NodeKind::Action, "x"}}, {});
  CHECK(reachable_from(single, "a") == std::set<std::string>{"a"});

  ActivityDiagram two({{"a", NodeKind::Action, "x"}, {"b", NodeKind::Action, "y"}, {"c", NodeKind::Action, "z"},
                       {"d", NodeKind::Action, "w"}},
                      {{"a", "b", std::nullopt}, {"b", "a", std::nullopt}, {"c", "d", std::nullopt}});
  CHECK(reachable_from(two, "a") == std::set<std::string>{"a", "b"});
  CHECK_THROWS_AS(reachable_from(two, "q"), NodeNotFound);
}

TEST_CASE("normalize collapses sequential action chains") {
  SUBCASE("two-node chain") {
    ActivityDiagram ad({{"A", NodeKind::Action, "check logs"}, {"B", NodeKind::Action, "archive logs"}},
                       {{"A", "B", std::nullopt}});
    auto n = normalize(ad);
    REQUIRE(n.size() == 1);
    CHECK(n.nodes()[0].id == "A");
    CHECK(n.nodes()[0].label == "check logs. archive logs");
    CHECK(n.transitions().empty());
  }
  SUBCASE("no chain is a fixed point") {
    auto ad = testsupport::fixture("stuck_truth.csv");
    CHECK(normalize(ad) == ad);
  }
  SUBCASE("decision in the middle blocks the chain") {
    ActivityDiagram ad({{"A", NodeKind::Action, "a"}, {"D", NodeKind::Decision, "d"}, {"B", NodeKind::Action, "b"}},
                       {{"A", "D", std::nullopt}, {"D", "B", std::string("[y]")}});
    CHECK(normalize(ad) == ad);
  }
  SUBCASE("chain keeps outer edges") {
    ActivityDiagram ad({{"i", NodeKind::Initial, ""},
                        {"a", NodeKind::Action, "one"},
                        {"b", NodeKind::Action, "two"},
                        {"c", NodeKind::Action, "three"},
                        {"e", NodeKind::End, ""}},
                       {{"i", "a", std::nullopt}, {"a", "b", std::nullopt}, {"b", "c", std::nullopt},
                        {"c", "e", std::nullopt}});
    auto n = normalize(ad);
    ActivityDiagram expected({{"i", NodeKind::Initial, ""}, {"a", NodeKind::Action, "one. two. three"}, {"e", NodeKind::End, ""}},
                             {{"i", "a", std::nullopt}, {"a", "e", std::nullopt}});
    CHECK(n == expected);
  }
  SUBCASE("labelled link, fork and join stop the chain") {
    ActivityDiagram ad({{"a", NodeKind::Action, "a"}, {"b", NodeKind::Action, "b"}, {"c", NodeKind::Action, "c"},
                        {"d", NodeKind::Action, "d"}, {"e", NodeKind::Action, "e"}},
                       {{"a", "b", std::string("[x]")}, {"b", "c", std::nullopt}, {"b", "d", std::nullopt},
                        {"c", "e", std::nullopt}, {"d", "e", std::nullopt}});
    CHECK(normalize(ad) == ad);
  }
  SUBCASE("pure cycle is left alone") {
    ActivityDiagram ad({{"a", NodeKind::Action, "a"}, {"b", NodeKind::Action, "b"}},
                       {{"a", "b", std::nullopt}, {"b", "a", std::nullopt}});
    CHECK(normalize(ad) == ad);
  }
  SUBCASE("chain whose tail loops back to its head") {
    ActivityDiagram ad({{"i", NodeKind::Initial, ""}, {"a", NodeKind::Action, "a"}, {"b", NodeKind::Action, "b"}},
                       {{"i", "a", std::nullopt}, {"a", "b", std::nullopt}, {"b", "a", std::nullopt}});
    auto n = normalize(ad);
    CHECK(normalize(n) == n);
  }
}

TEST_CASE("normalize properties on random diagrams") {
  testsupport::Rng rng(7);
  for (int round = 0; round < 300; ++round) {
    auto ad = round % 2 ? testsupport::random_sound_diagram(rng, testsupport::uniform(rng, 0, 10))
                        : testsupport::random_match_side(rng, 8, "m");
    auto n = normalize(ad);
    CAPTURE(round);
    CHECK(normalize(n) == n);
    CHECK(n.size() <= ad.size());
    for (auto k : {NodeKind::Decision, NodeKind::Initial, NodeKind::End}) {
      CHECK(n.nodes_of_kind(k).size() == ad.nodes_of_kind(k).size());
    }
    std::multiset<std::string> before, after;
    for (const auto& t : ad.transitions()) {
      if (t.label) before.insert(*t.label);
    }
    for (const auto& t : n.transitions()) {
      if (t.label) after.insert(*t.label);
    }
    CHECK(before == after);
    // Collapsing k nodes removes exactly k-1 links.
    CHECK(ad.size() - n.size() == ad.transitions().size() - n.transitions().size());
    for (const auto& node : ad.nodes()) {
      if (node.kind == NodeKind::Action && ad.out_degree(node.id) >= 2) CHECK(n.contains(node.id));
    }
  }
}
