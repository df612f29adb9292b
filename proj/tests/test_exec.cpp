#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace repath;
using namespace repath::testutil;

namespace {

std::set<std::string> stub_names(const LabeledGraph& g, const Workspace& ws, OccId occ) {
  std::set<std::string> out;
  for (const auto& [v, stub] : ws.set_of(occ)) out.insert(g.external_name(v));
  return out;
}

std::set<std::pair<std::string, std::string>> named_links(const LabeledGraph& g, const Workspace& ws,
                                                          OccId a, OccId b) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [u, v] : ws.links_between(a, b))
    out.emplace(g.external_name(u), g.external_name(v));
  return out;
}

// occurrence id of the idx-th symbol with the given text
OccId occ_of(const LogicalPlan& plan, const std::string& sym, int idx = 0) {
  int seen = 0;
  for (OccId o = 0; o < plan.occs.size(); ++o) {
    if (plan.occs.symbol(o) == sym && plan.occs.copy_of(o) == kNoOcc) {
      if (seen == idx) return o;
      ++seen;
    }
  }
  FAIL("no such occurrence");
  return kNoOcc;
}

}  // namespace

TEST_CASE("op_load") {
  LabeledGraph g = load_g0();
  LogicalPlan plan = gen_logical_ops(parse("a(b|c)"));
  ExecContext cx(g, plan.occs);
  op_load(cx, {occ_of(plan, "a")});
  CHECK(stub_names(g, cx.ws, occ_of(plan, "a")) == std::set<std::string>{"a1"});
  op_load(cx, {occ_of(plan, "b"), occ_of(plan, "c")});
  CHECK(stub_names(g, cx.ws, occ_of(plan, "b")) == std::set<std::string>{"b1"});
  CHECK(stub_names(g, cx.ws, occ_of(plan, "c")) == std::set<std::string>{"c1", "c2", "c3"});

  LabeledGraph empty = ingest({}, {}, 1);
  ExecContext cx2(empty, plan.occs);
  op_load(cx2, {occ_of(plan, "a")});
  CHECK(cx2.ws.size_of(occ_of(plan, "a")) == 0);
}

TEST_CASE("op_neighbor reproduces the a(b|c) intermediate") {
  LabeledGraph g = load_g0();
  LogicalPlan plan = gen_logical_ops(parse("a(b|c)"));
  OccId a = occ_of(plan, "a"), b = occ_of(plan, "b"), c = occ_of(plan, "c");
  ExecContext cx(g, plan.occs);
  op_load(cx, {a});
  op_neighbor(cx, {a}, {b, c}, Direction::Forward);
  CHECK(stub_names(g, cx.ws, b) == std::set<std::string>{"b1"});
  CHECK(stub_names(g, cx.ws, c) == std::set<std::string>{"c1", "c2"});
  CHECK(named_links(g, cx.ws, a, b) == P({{"a1", "b1"}}));
  CHECK(named_links(g, cx.ws, a, c) == P({{"a1", "c1"}, {"a1", "c2"}}));

  // empty source set is a no-op
  ExecContext cx2(g, plan.occs);
  op_neighbor(cx2, {a}, {b, c}, Direction::Forward);
  CHECK(cx2.ws.size_of(b) == 0);

  // no a directly precedes a g: filters empty both classes
  LogicalPlan plan2 = gen_logical_ops(parse("ag"));
  OccId a2 = occ_of(plan2, "a"), g2 = occ_of(plan2, "g");
  ExecContext cx3(g, plan2.occs);
  op_load(cx3, {g2});
  op_neighbor(cx3, {g2}, {a2}, Direction::Backward);
  cx3.ws.filter(g2, std::vector<OccId>{a2});
  CHECK(cx3.ws.size_of(a2) == 0);
  CHECK(cx3.ws.size_of(g2) == 0);
}

TEST_CASE("op_single_link composes the E3 state") {
  // run the default plan of q1 up to the last composition, then check that
  // SingleLink(a, {e,f}, g) links a1 to all three g's
  LabeledGraph g = load_g0();
  LogicalPlan plan = gen_logical_ops(parse("a(be|(cd)^+f)g"));
  PhysicalPlan phys = default_plan(plan);
  ExecContext cx(g, plan.occs);
  for (std::size_t i = 0; i + 1 < phys.ops.size(); ++i) run_physical(cx, phys.ops[i]);
  const PhysicalOp& last = phys.ops.back();
  REQUIRE(last.kind == PhysicalOp::Kind::SingleLink);
  run_physical(cx, last);
  OccId a = occ_of(plan, "a"), gq = occ_of(plan, "g");
  CHECK(named_links(g, cx.ws, a, gq) == P({{"a1", "g1"}, {"a1", "g2"}, {"a1", "g3"}}));
}

TEST_CASE("op_single_link trivial cases") {
  // chain u->v with no w behind it: u is filtered out
  std::vector<EdgeRecord> e{{"u", "v"}};
  std::vector<LabelRecord> l{{"u", "a"}, {"v", "b"}, {"w", "c"}};
  LabeledGraph g = ingest(e, l, 1);
  LogicalPlan plan = gen_logical_ops(parse("abc"));
  OccId a = occ_of(plan, "a"), b = occ_of(plan, "b"), c = occ_of(plan, "c");
  ExecContext cx(g, plan.occs);
  op_load(cx, {a});
  op_neighbor(cx, {a}, {b}, Direction::Forward);
  op_neighbor(cx, {b}, {c}, Direction::Forward);
  op_single_link(cx, {a}, {b}, {c});
  cx.ws.filter(a, std::vector<OccId>{c});
  cx.ws.filter(c, std::vector<OccId>{a});
  CHECK(cx.ws.size_of(a) == 0);

  // empty a-set: no-op, no error
  ExecContext cx2(g, plan.occs);
  cx2.ws.register_link_class(a, b);
  cx2.ws.register_link_class(b, c);
  CHECK_NOTHROW(op_single_link(cx2, {a}, {b}, {c}));

  // links never built: MissingLinkClass
  ExecContext cx3(g, plan.occs);
  op_load(cx3, {a});
  CHECK_THROWS_AS(op_single_link(cx3, {a}, {b}, {c}), MissingLinkClassError);
}

TEST_CASE("op_double_link") {
  // 4-chain w->x->y->z
  std::vector<EdgeRecord> e{{"w", "x"}, {"x", "y"}, {"y", "z"}};
  std::vector<LabelRecord> l{{"w", "a"}, {"x", "b"}, {"y", "c"}, {"z", "d"}};
  LabeledGraph g = ingest(e, l, 1);
  LogicalPlan plan = gen_logical_ops(parse("abcd"));
  OccId a = occ_of(plan, "a"), b = occ_of(plan, "b"), c = occ_of(plan, "c"), d = occ_of(plan, "d");
  ExecContext cx(g, plan.occs);
  op_load(cx, {a});
  op_neighbor(cx, {a}, {b}, Direction::Forward);
  op_neighbor(cx, {b}, {c}, Direction::Forward);
  op_neighbor(cx, {c}, {d}, Direction::Forward);
  op_double_link(cx, {a}, {b}, {c}, {d});
  CHECK(named_links(g, cx.ws, a, d) == P({{"w", "z"}}));

  // two parallel b's converging on one c: the (a,d) link deduplicates
  std::vector<EdgeRecord> e2{{"w", "x1"}, {"w", "x2"}, {"x1", "y"}, {"x2", "y"}, {"y", "z"}};
  std::vector<LabelRecord> l2{{"w", "a"}, {"x1", "b"}, {"x2", "b"}, {"y", "c"}, {"z", "d"}};
  LabeledGraph g2 = ingest(e2, l2, 1);
  ExecContext cx2(g2, plan.occs);
  op_load(cx2, {a});
  op_neighbor(cx2, {a}, {b}, Direction::Forward);
  op_neighbor(cx2, {b}, {c}, Direction::Forward);
  op_neighbor(cx2, {c}, {d}, Direction::Forward);
  op_double_link(cx2, {a}, {b}, {c}, {d});
  CHECK(named_links(g2, cx2.ws, a, d) == P({{"w", "z"}}));

  // empty c-set: a filtered out
  ExecContext cx3(g, plan.occs);
  cx3.ws.register_link_class(a, b);
  cx3.ws.register_link_class(b, c);
  cx3.ws.register_link_class(c, d);
  op_load(cx3, {a});
  op_double_link(cx3, {a}, {b}, {c}, {d});
  cx3.ws.filter(a, std::vector<OccId>{d});
  CHECK(cx3.ws.size_of(a) == 0);
}

TEST_CASE("op_closure_link on g0") {
  LabeledGraph g = load_g0();
  LogicalPlan plan = gen_logical_ops(parse("(cd)^+"));
  OccId c = plan.ops[0].head[0], d = plan.ops[0].tail[0];
  ExecContext cx(g, plan.occs);
  op_load(cx, {c});
  op_closure_link(cx, {c}, {d}, Direction::Forward, PhysicalOp::ClosureStep::GraphStep);
  auto links = named_links(g, cx.ws, c, d);
  CHECK(links == P({{"c1", "d1"},
                    {"c1", "d2"},
                    {"c1", "d3"},
                    {"c2", "d2"},
                    {"c2", "d3"},
                    {"c3", "d2"},
                    {"c3", "d3"}}));
  // c1 reaches d1,d2,d3; c3 reaches d2,d3; the 2-cycle c3->d2->c3
  // terminates without duplicates
}

TEST_CASE("op_closure_link seeded like the worked example") {
  // seeds {c1, c2} only (a's successors); c3 is discovered, not an input
  LabeledGraph g = load_g0();
  LogicalPlan plan = gen_logical_ops(parse("(cd)^+"));
  OccId c = plan.ops[0].head[0], d = plan.ops[0].tail[0];
  ExecContext cx(g, plan.occs);
  cx.ws.ensure(c, *g.vertex_by_name("c1"));
  cx.ws.ensure(c, *g.vertex_by_name("c2"));
  op_closure_link(cx, {c}, {d}, Direction::Forward, PhysicalOp::ClosureStep::GraphStep);
  auto links = named_links(g, cx.ws, c, d);
  CHECK(links.count({"c1", "d1"}) == 1);
  CHECK(links.count({"c1", "d2"}) == 1);
  CHECK(links.count({"c1", "d3"}) == 1);
  CHECK(links.count({"c3", "d2"}) == 1);  // interior node gets its own links
  CHECK(links.count({"c2", "d1"}) == 0);  // d1 is unreachable from c2
}

TEST_CASE("op_closure_link single pair and scc completeness") {
  std::vector<EdgeRecord> e{{"x", "y"}};
  std::vector<LabelRecord> l{{"x", "c"}, {"y", "d"}};
  LabeledGraph g = ingest(e, l, 1);
  LogicalPlan plan = gen_logical_ops(parse("(cd)^+"));
  OccId c = plan.ops[0].head[0], d = plan.ops[0].tail[0];
  ExecContext cx(g, plan.occs);
  op_load(cx, {c});
  op_closure_link(cx, {c}, {d}, Direction::Forward, PhysicalOp::ClosureStep::GraphStep);
  CHECK(named_links(g, cx.ws, c, d) == P({{"x", "y"}}));

  // a cycle whose members have late-explored branches: every cycle member
  // must still see every descendant
  std::vector<EdgeRecord> e2{{"c1", "d1"}, {"d1", "c2"}, {"c2", "d2"},
                             {"d2", "c1"}, {"c1", "d4"}};
  std::vector<LabelRecord> l2{{"c1", "c"}, {"c2", "c"}, {"d1", "d"}, {"d2", "d"}, {"d4", "d"}};
  LabeledGraph g2 = ingest(e2, l2, 1);
  ExecContext cx2(g2, plan.occs);
  op_load(cx2, {c});
  op_closure_link(cx2, {c}, {d}, Direction::Forward, PhysicalOp::ClosureStep::GraphStep);
  auto links = named_links(g2, cx2.ws, c, d);
  CHECK(links == P({{"c1", "d1"},
                    {"c1", "d2"},
                    {"c1", "d4"},
                    {"c2", "d1"},
                    {"c2", "d2"},
                    {"c2", "d4"}}));
}

TEST_CASE("closure visit bound") {
  LabeledGraph g = load_g0();
  LogicalPlan plan = gen_logical_ops(parse("(cd)^+"));
  PhysicalPlan phys = default_plan(plan);
  std::vector<std::map<std::pair<OccId, VertexId>, int>> expansions;
  execute_plan(g, plan.occs, phys, true, &expansions);
  REQUIRE(!expansions.empty());
  for (const auto& per_closure : expansions)
    for (const auto& [key, count] : per_closure) CHECK(count <= 1);
}

TEST_CASE("op_self_link") {
  LabeledGraph g = load_g0();
  LogicalPlan plan = gen_logical_ops(parse("c+"));
  const auto& cl = plan.ops[0];
  ExecContext cx(g, plan.occs);
  op_load(cx, cl.base);
  op_self_link(cx, cl.base, cl.head, cl.tail);
  CHECK(cx.ws.size_of(cl.head[0]) == 3);
  CHECK(cx.ws.size_of(cl.tail[0]) == 3);
  CHECK(cx.ws.links_between(cl.head[0], cl.tail[0]).size() == 3);  // |R_c| pairwise

  ExecContext cx2(g, plan.occs);
  op_self_link(cx2, cl.base, cl.head, cl.tail);  // empty source
  CHECK(cx2.ws.size_of(cl.head[0]) == 0);
}

TEST_CASE("extract_pairs") {
  LabeledGraph g = load_g0();
  CHECK(pairs_of(g, "a(be|(cd)^+f)g", Engine::Central, false) ==
        P({{"a1", "g1"}, {"a1", "g2"}, {"a1", "g3"}}));
  CHECK(pairs_of(g, "cd", Engine::Central, false) ==
        P({{"c1", "d1"}, {"c2", "d2"}, {"c3", "d2"}, {"c3", "d3"}}));
  // empty workspace
  CHECK(pairs_of(g, "gz" /* parses, z unknown */, Engine::Central, false).empty());
}

TEST_CASE("single symbol and wildcard queries") {
  LabeledGraph g = load_g0();
  CHECK(pairs_of(g, "a") == P({{"a1", "a1"}}));
  CHECK(pairs_of(g, "#").size() == 15);
  CHECK(pairs_of(g, "a|b") == P({{"a1", "a1"}, {"b1", "b1"}}));
}

TEST_CASE("the graph is never mutated by a query") {
  LabeledGraph g = load_g0();
  std::uint64_t before = g.structure_checksum();
  pairs_of(g, "a(be|(cd)^+f)g");
  pairs_of(g, "(cd)+#");
  CHECK(g.structure_checksum() == before);
}

TEST_CASE("plan-order independence on g0") {
  LabeledGraph g = load_g0();
  for (const std::string& q : {"abc" /* no such path, empty */, "a(b|c)", "a(cd)+", "cd"}) {
    LogicalPlan lp = gen_logical_ops(parse(q));
    auto oracle = name_pairs(g, match_pairs_bruteforce(g, parse(q)));
    OperationGraph og = build_operation_graph(lp.ops);
    const int k = static_cast<int>(lp.ops.size());
    std::vector<std::pair<int, Direction>> order;
    std::function<void(std::uint32_t)> rec = [&](std::uint32_t done) {
      if (static_cast<int>(order.size()) == k) {
        PhysicalPlan plan = lower_plan(lp, order);
        auto got = name_pairs(g, execute_plan(g, lp.occs, plan).pairs);
        CHECK(got == oracle);
        return;
      }
      for (int v = 0; v < k; ++v) {
        if (done & (1u << v)) continue;
        if (done && !og.adjacent(v, done)) continue;
        for (Direction d : {Direction::Forward, Direction::Backward}) {
          order.emplace_back(v, d);
          rec(done | (1u << v));
          order.pop_back();
        }
      }
    };
    rec(0);
  }
}

TEST_CASE("oracle equivalence, small randomized matrix") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 60; ++t) {
    LabeledGraph g = random_graph(rng);
    std::string q = testutil::random_query(g, rng);
    auto oracle = name_pairs(g, match_pairs_bruteforce(g, parse(q)));
    CHECK(pairs_of(g, q, Engine::Central, true) == oracle);
    CHECK(pairs_of(g, q, Engine::Central, false) == oracle);
  }
}

TEST_CASE("single-symbol closure reaches multi-hop descendants") {
  // x -> y -> z, all label a: a+ must pair (x,z), not just adjacent hops
  std::vector<EdgeRecord> e{{"x", "y"}, {"y", "z"}};
  std::vector<LabelRecord> l{{"x", "a"}, {"y", "a"}, {"z", "a"}};
  LabeledGraph g = ingest(e, l, 1);
  CHECK(pairs_of(g, "a+") == P({{"x", "x"},
                                {"x", "y"},
                                {"x", "z"},
                                {"y", "y"},
                                {"y", "z"},
                                {"z", "z"}}));
}

TEST_CASE("closure boundary classes keep their orientation") {
  // v is a sink: (#|ab)+ must not pair v with vertices that only reach v
  std::vector<EdgeRecord> e{{"u", "v"}, {"w", "u"}};
  std::vector<LabelRecord> l{{"u", "a"}, {"v", "b"}, {"w", "b"}};
  LabeledGraph g = ingest(e, l, 1);
  auto oracle = name_pairs(g, match_pairs_bruteforce(g, parse("(#|ab)+")));
  CHECK(pairs_of(g, "(#|ab)+") == oracle);
  CHECK(oracle.count({"w", "v"}) == 1);
  CHECK(oracle.count({"v", "w"}) == 0);
}

TEST_CASE("shared-boundary closure body followed by a concatenation") {
  // v6(b) -> v4(b) -> v1(c): v6 completes (b|bd)+ only through v4, so the
  // b-class must not be pruned on direct c-successors
  std::vector<EdgeRecord> e{{"v6", "v4"}, {"v4", "v1"}, {"v4", "v8"}, {"v8", "v9"}};
  std::vector<LabelRecord> l{{"v6", "b"}, {"v4", "b"}, {"v1", "c"}, {"v8", "d"}, {"v9", "c"}};
  LabeledGraph g = ingest(e, l, 1);
  auto oracle = name_pairs(g, match_pairs_bruteforce(g, parse("(b|bd)+c")));
  CHECK(oracle.count({"v6", "v1"}) == 1);
  CHECK(pairs_of(g, "(b|bd)+c", Engine::Central, false) == oracle);
  CHECK(pairs_of(g, "(b|bd)+c", Engine::Central, true) == oracle);
}

TEST_CASE("adversarial closure shapes match the oracle") {
  // nested closures, shared boundaries, wildcards inside closures
  std::mt19937_64 rng(424242);
  auto shape = [&](auto&& self, int depth) -> std::string {
    int r = static_cast<int>(rng() % 12);
    auto sym = [&]() -> std::string {
      int k = static_cast<int>(rng() % 8);
      return k == 7 ? "#" : std::string(1, static_cast<char>('a' + k % 4));
    };
    if (depth > 2 || r < 3) return sym();
    switch (r % 5) {
      case 0: return self(self, depth + 1) + self(self, depth + 1);
      case 1: return "(" + self(self, depth + 1) + "|" + self(self, depth + 1) + ")";
      case 2: return "(" + self(self, depth + 1) + ")+";
      case 3: return "(" + sym() + "|" + sym() + self(self, depth + 1) + ")";
      default: return "((" + self(self, depth + 1) + ")+" + sym() + ")+";
    }
  };
  int done = 0;
  while (done < 120) {
    LabeledGraph g = random_graph(rng, 20, 4, 3);
    std::string q = shape(shape, 0);
    LogicalPlan probe = gen_logical_ops(parse(q));
    if (probe.ops.size() > 6) continue;
    ++done;
    std::set<std::pair<std::string, std::string>> oracle;
    try {
      oracle = name_pairs(g, match_pairs_bruteforce(g, parse(q)));
    } catch (const TooLargeError&) {
      continue;
    }
    CHECK(pairs_of(g, q, Engine::Central, false) == oracle);
    CHECK(pairs_of(g, q, Engine::Central, true) == oracle);
  }
}
