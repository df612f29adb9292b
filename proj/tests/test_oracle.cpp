#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace repath;
using namespace repath::testutil;

namespace {

// every label word accepted up to the given length, by enumeration
std::set<std::string> language(const Nfa& nfa, const std::vector<std::string>& alphabet,
                               int max_len) {
  std::set<std::string> out;
  std::vector<std::vector<std::string>> words{{}};
  for (int len = 0; len <= max_len; ++len) {
    std::vector<std::vector<std::string>> next;
    for (const auto& w : words) {
      if (nfa.accepts(w)) {
        std::string s;
        for (const auto& c : w) s += c;
        out.insert(s);
      }
      if (len == max_len) continue;
      for (const auto& c : alphabet) {
        auto w2 = w;
        w2.push_back(c);
        next.push_back(std::move(w2));
      }
    }
    words = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("nfa for a single symbol") {
  Nfa nfa = build_nfa(parse("a"));
  CHECK(nfa.accepts({"a"}));
  CHECK_FALSE(nfa.accepts({}));
  CHECK_FALSE(nfa.accepts({"b"}));
  CHECK_FALSE(nfa.accepts({"a", "a"}));
}

TEST_CASE("nfa language of a(b|c)") {
  Nfa nfa = build_nfa(parse("a(b|c)"));
  CHECK(language(nfa, {"a", "b", "c"}, 3) == std::set<std::string>{"ab", "ac"});
}

TEST_CASE("plus is one-or-more") {
  Nfa nfa = build_nfa(parse("(cd)^+"));
  CHECK(nfa.accepts({"c", "d"}));
  CHECK(nfa.accepts({"c", "d", "c", "d"}));
  CHECK_FALSE(nfa.accepts({}));
  CHECK_FALSE(nfa.accepts({"c"}));
  CHECK_FALSE(nfa.accepts({"c", "d", "c"}));
}

TEST_CASE("wildcard matches any label") {
  Nfa nfa = build_nfa(parse("a#b"));
  CHECK(nfa.accepts({"a", "z", "b"}));
  CHECK(nfa.accepts({"a", "a", "b"}));
  CHECK_FALSE(nfa.accepts({"a", "b"}));
}

TEST_CASE("match_pairs_bruteforce on g0") {
  LabeledGraph g = load_g0();
  CHECK(name_pairs(g, match_pairs_bruteforce(g, parse("a(be|(cd)^+f)g"))) ==
        P({{"a1", "g1"}, {"a1", "g2"}, {"a1", "g3"}}));
  CHECK(name_pairs(g, match_pairs_bruteforce(g, parse("a"))) == P({{"a1", "a1"}}));
  CHECK(name_pairs(g, match_pairs_bruteforce(g, parse("a(cd)^+"))) ==
        P({{"a1", "d1"}, {"a1", "d2"}, {"a1", "d3"}}));
}

TEST_CASE("product guard") {
  std::vector<std::string> labels{"a"};
  LabeledGraph big = generate_rmat(1 << 12, 1, labels, 3);
  // ~60 states x 4096 vertices stays under the guard; a much longer query
  // with a big graph trips it
  std::string q;
  for (int i = 0; i < 200; ++i) q += "(a|a)";
  CHECK_THROWS_AS(match_pairs_bruteforce(big, parse(q)), TooLargeError);
}

TEST_CASE("single-vertex language property") {
  LabeledGraph g = load_g0();
  for (const std::string& l : {"a", "c", "g"}) {
    auto pairs = match_pairs_bruteforce(g, parse(l));
    for (auto [u, v] : pairs) {
      CHECK(u == v);
      CHECK(g.label_name(g.label_of(u)) == l);
    }
    CHECK(pairs.size() == g.vertices_by_label(l).size());
  }
}

TEST_CASE("alternation is the union of its sides") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 40; ++t) {
    LabeledGraph g = random_graph(rng, 20);
    std::string q1 = testutil::random_query(g, rng, 4);
    std::string q2 = testutil::random_query(g, rng, 4);
    auto p1 = match_pairs_bruteforce(g, parse(q1));
    auto p2 = match_pairs_bruteforce(g, parse(q2));
    auto both = match_pairs_bruteforce(g, parse("(" + q1 + ")|(" + q2 + ")"));
    std::set<std::pair<VertexId, VertexId>> expected = p1;
    expected.insert(p2.begin(), p2.end());
    CHECK(both == expected);
  }
}

TEST_CASE("closure unrolling containment") {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 40; ++t) {
    LabeledGraph g = random_graph(rng, 20);
    std::string w = testutil::random_query(g, rng, 3, 0.2, 0.1);
    auto closed = match_pairs_bruteforce(g, parse("(" + w + ")+"));
    auto once = match_pairs_bruteforce(g, parse(w));
    auto twice = match_pairs_bruteforce(g, parse("(" + w + ")(" + w + ")"));
    for (const auto& p : once) CHECK(closed.count(p) == 1);
    for (const auto& p : twice) CHECK(closed.count(p) == 1);
  }
}
