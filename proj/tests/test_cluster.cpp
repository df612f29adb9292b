#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "test_util.hpp"

using namespace repath;
using namespace repath::testutil;

namespace {

// machine layout in the style of the distributed worked example:
// M1{a1,c1,...}, M2{c2, e1, f1, ...}, M3{f2, f3, d1, d2, ...}, M4{g1,g2}, M5{g3}
std::map<std::string, std::uint32_t> fig4_layout() {
  return {
      {"a1", 0}, {"b1", 0}, {"c1", 0},
      {"c2", 1}, {"e1", 1}, {"f1", 1},
      {"d1", 2}, {"d2", 2}, {"d3", 2}, {"f2", 2}, {"f3", 2}, {"c3", 2},
      {"g1", 3}, {"g2", 3},
      {"g3", 4},
  };
}

std::size_t count_messages(const std::vector<MessageLogEntry>& log, const std::string& primitive) {
  std::size_t n = 0;
  for (const auto& e : log)
    if (e.primitive == primitive) ++n;
  return n;
}

}  // namespace

TEST_CASE("batch_get_neighbor groups one message per destination") {
  LabeledGraph g = load_g0_placed(fig4_layout(), 5);
  LogicalPlan lp = gen_logical_ops(parse("a(e|f)g"));
  Cluster cluster(g, lp.occs);

  // a1's {e,f} frontier: e1,f1 on M2 and f2,f3 on M3 -> exactly two messages
  OccId e_occ = 1, f_occ = 2, g_occ = 3;
  std::vector<NeighborRequest> reqs;
  for (const char* v : {"e1", "f1"})
    reqs.push_back({*g.vertex_by_name(v), e_occ, g_occ, Direction::Forward,
                    NeighborRequest::Source::Adjacency, false});
  for (const char* v : {"f2", "f3"})
    reqs.push_back({*g.vertex_by_name(v), f_occ, g_occ, Direction::Forward,
                    NeighborRequest::Source::Adjacency, false});
  auto rows = cluster.batch_get_neighbor(reqs);
  CHECK(count_messages(cluster.message_log(), "GetNeighbor") == 2);
  std::set<std::uint32_t> dests;
  for (const auto& e : cluster.message_log())
    if (e.primitive == "GetNeighbor") dests.insert(e.dst);
  CHECK(dests == std::set<std::uint32_t>{1, 2});
  // replies carry the g-neighbors: g1 (from e1 and f1), g2, g3
  std::set<std::string> found;
  for (const auto& r : rows) found.insert(g.external_name(r.cid));
  CHECK(found == std::set<std::string>{"g1", "g2", "g3"});
}

TEST_CASE("batch_get_neighbor trivial cases") {
  LabeledGraph g = load_g0_placed(fig4_layout(), 5);
  LogicalPlan lp = gen_logical_ops(parse("cd"));
  Cluster cluster(g, lp.occs);
  CHECK(cluster.batch_get_neighbor({}).empty());
  CHECK(cluster.message_log().empty());

  // 100 requests all owned by one worker collapse into one message
  std::vector<NeighborRequest> reqs;
  for (int i = 0; i < 100; ++i)
    reqs.push_back({*g.vertex_by_name("d1"), 1, 0, Direction::Backward,
                    NeighborRequest::Source::Adjacency, false});
  cluster.batch_get_neighbor(reqs);
  CHECK(count_messages(cluster.message_log(), "GetNeighbor") == 1);

  // unknown vertex id
  std::vector<NeighborRequest> bad{{VertexId::pack(0, 999), 0, 1, Direction::Forward,
                                    NeighborRequest::Source::Adjacency, false}};
  CHECK_THROWS_AS(cluster.batch_get_neighbor(bad), UnknownVertexError);
}

TEST_CASE("batch_add_link routes to both owners and is idempotent") {
  LabeledGraph g = load_g0_placed(fig4_layout(), 5);
  LogicalPlan lp = gen_logical_ops(parse("ag"));
  Cluster cluster(g, lp.occs);
  LinkRecord rec{*g.vertex_by_name("a1"), 0, *g.vertex_by_name("g3"), 1};
  cluster.batch_add_link({rec});
  // one message to the a1 owner, one to the g3 owner
  CHECK(count_messages(cluster.message_log(), "AddLink") == 2);
  CHECK(cluster.shard(0).has(0, rec.pid));
  CHECK(cluster.shard(4).has(1, rec.cid));

  std::string before = cluster.merged().dump();
  cluster.batch_add_link({rec, rec});
  CHECK(cluster.merged().dump() == before);

  // k records to p partitions: at most one message per destination
  Cluster c2(g, lp.occs);
  std::vector<LinkRecord> recs;
  for (const char* v : {"g1", "g2", "g3"})
    recs.push_back({*g.vertex_by_name("a1"), 0, *g.vertex_by_name(v), 1});
  c2.batch_add_link(recs);
  std::map<std::uint32_t, int> per_dst;
  for (const auto& e : c2.message_log())
    if (e.primitive == "AddLink") per_dst[e.dst]++;
  for (const auto& [dst, n] : per_dst) CHECK(n == 1);
}

TEST_CASE("distributed single link reproduces the worked example") {
  LabeledGraph g = load_g0_placed(fig4_layout(), 5);
  QueryOptions opt;
  opt.optimize = false;
  auto res = run_query(g, "a(be|(cd)^+f)g", Engine::Dist, opt);
  CHECK(res.pairs == P({{"a1", "g1"}, {"a1", "g2"}, {"a1", "g3"}}));
}

TEST_CASE("one partition matches the centralized workspace exactly") {
  LabeledGraph g = load_g0();
  for (const std::string& q : {"a(be|(cd)^+f)g", "cd", "a(cd)+", "c+"}) {
    PreparedQuery pq = prepare_query(g, q, false);
    ExecContext cx(g, pq.logical.occs);
    for (const auto& op : pq.physical.ops) run_physical(cx, op);

    Cluster cluster(g, pq.logical.occs);
    cluster.execute(pq.physical);
    CHECK(cluster.merged().dump() == cx.ws.dump());
  }
}

TEST_CASE("distributed equals centralized across partition counts") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 25; ++t) {
    LabeledGraph base = random_graph(rng);
    std::string q = testutil::random_query(base, rng);
    std::ostringstream eb, lb;
    write_graph_files(base, eb, lb);
    auto oracle = pairs_of(base, q, Engine::Central);
    for (std::uint32_t p : {2u, 4u, 8u}) {
      GraphBuilder b(p, 31);
      std::istringstream li(lb.str()), ei(eb.str());
      std::string line;
      while (std::getline(li, line)) {
        auto i = line.find('\t');
        b.add_label(line.substr(0, i), line.substr(i + 1));
      }
      while (std::getline(ei, line)) {
        auto i = line.find('\t');
        b.add_edge(line.substr(0, i), line.substr(i + 1));
      }
      LabeledGraph gp = std::move(b).build();
      CHECK(pairs_of(gp, q, Engine::Dist, true, p) == oracle);
    }
  }
}

TEST_CASE("closure rounds: seeded workers request the d-owner in round one") {
  LabeledGraph g = load_g0_placed({{"c1", 0}, {"c2", 1}, {"d1", 2}, {"d2", 2}, {"d3", 2},
                                   {"c3", 2}, {"a1", 3}, {"b1", 3}, {"e1", 3}, {"f1", 3},
                                   {"f2", 3}, {"f3", 3}, {"g1", 4}, {"g2", 4}, {"g3", 4}},
                                  5);
  LogicalPlan lp = gen_logical_ops(parse("(cd)+"));
  PhysicalPlan plan = default_plan(lp);
  Cluster cluster(g, lp.occs);
  cluster.execute(plan);

  // the first GetNeighbor wave that crosses workers: expansions of the d
  // frontier, sent from the seed owners M1 and M2 to the d owner M3
  int first_round = -1;
  std::set<std::pair<std::uint32_t, std::uint32_t>> wave;
  for (const auto& e : cluster.message_log()) {
    if (e.primitive != "GetNeighbor") continue;
    if (first_round < 0) first_round = e.round;
    if (e.round == first_round) wave.emplace(e.src, e.dst);
  }
  CHECK(wave == std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 2}, {1, 2}});

  // links equal the centralized closure
  ExecContext cx(g, lp.occs);
  for (const auto& op : plan.ops) run_physical(cx, op);
  CHECK(cluster.merged().dump() == cx.ws.dump());
}

TEST_CASE("acyclic chain closure needs one round") {
  std::vector<EdgeRecord> e{{"x", "y"}};
  std::vector<LabelRecord> l{{"x", "c"}, {"y", "d"}};
  GraphBuilder b(2);
  b.add_label("x", "c");
  b.add_label("y", "d");
  b.add_edge("x", "y");
  b.place("x", 0);
  b.place("y", 1);
  LabeledGraph g = std::move(b).build();
  CHECK(pairs_of(g, "(cd)+", Engine::Dist, false, 2) == P({{"x", "y"}}));
}

TEST_CASE("two-cycle across two partitions terminates and matches") {
  GraphBuilder b(2);
  for (auto [v, l] : std::initializer_list<std::pair<const char*, const char*>>{
           {"c3", "c"}, {"d2", "d"}, {"c1", "c"}, {"d1", "d"}})
    b.add_label(v, l);
  b.add_edge("c3", "d2");
  b.add_edge("d2", "c3");
  b.add_edge("c1", "d1");
  b.add_edge("d1", "c3");
  b.place("c3", 0);
  b.place("d2", 1);
  b.place("c1", 1);
  b.place("d1", 0);
  LabeledGraph g = std::move(b).build();
  auto dist = pairs_of(g, "(cd)+", Engine::Dist, false, 2);
  auto central = pairs_of(g, "(cd)+", Engine::Central, false);
  CHECK(dist == central);
  CHECK(dist.count({"c3", "d2"}) == 1);
}

TEST_CASE("double link round count") {
  // w->x->y->z split across four workers: 2 GetNeighbor waves + 1 AddLink
  GraphBuilder b(4);
  b.add_label("w", "a");
  b.add_label("x", "b");
  b.add_label("y", "c");
  b.add_label("z", "d");
  b.add_edge("w", "x");
  b.add_edge("x", "y");
  b.add_edge("y", "z");
  for (auto [v, p] : std::initializer_list<std::pair<const char*, std::uint32_t>>{
           {"w", 0}, {"x", 1}, {"y", 2}, {"z", 3}})
    b.place(v, p);
  LabeledGraph g = std::move(b).build();

  LogicalPlan lp = gen_logical_ops(parse("abcd"));
  OccId a = 0, bo = 1, c = 2, d = 3;
  Cluster cluster(g, lp.occs);
  PhysicalOp load{.kind = PhysicalOp::Kind::Load, .a = {a}};
  PhysicalOp n1{.kind = PhysicalOp::Kind::Neighbor, .a = {a}, .b = {bo}};
  PhysicalOp n2{.kind = PhysicalOp::Kind::Neighbor, .a = {bo}, .b = {c}};
  PhysicalOp n3{.kind = PhysicalOp::Kind::Neighbor, .a = {c}, .b = {d}};
  for (const auto& op : {load, n1, n2, n3}) cluster.run_op(op);
  std::size_t before_gets = count_messages(cluster.message_log(), "GetNeighbor");
  PhysicalOp dl{.kind = PhysicalOp::Kind::DoubleLink, .a = {a}, .b = {bo}, .c = {c}, .d = {d}};
  cluster.run_op(dl);
  CHECK(count_messages(cluster.message_log(), "GetNeighbor") - before_gets == 2);
  CHECK(cluster.merged().links_between(a, d).size() == 1);

  // distributed neighbor on one partition equals centralized
  std::vector<EdgeRecord> e1{{"w", "x"}, {"x", "y"}, {"y", "z"}};
  std::vector<LabelRecord> l1{{"w", "a"}, {"x", "b"}, {"y", "c"}, {"z", "d"}};
  LabeledGraph g1 = ingest(e1, l1, 1);
  CHECK(pairs_of(g1, "ab", Engine::Dist, false, 1) == pairs_of(g1, "ab", Engine::Central, false));
}

TEST_CASE("message log is deterministic and schema-shaped") {
  LabeledGraph g = load_g0(4, 17);
  PreparedQuery pq = prepare_query(g, "a(be|(cd)^+f)g", false);
  Cluster c1(g, pq.logical.occs), c2(g, pq.logical.occs);
  c1.execute(pq.physical);
  c2.execute(pq.physical);
  std::ostringstream l1, l2;
  c1.dump_message_log(l1);
  c2.dump_message_log(l2);
  CHECK(l1.str() == l2.str());

  // header + five comma-separated fields per line
  std::istringstream in(l1.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "round,src,dst,primitive,records");
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
}

TEST_CASE("batching bound holds for a full query") {
  LabeledGraph g = load_g0(4, 17);
  PreparedQuery pq = prepare_query(g, "a(be|(cd)^+f)g", true);
  Cluster cluster(g, pq.logical.occs);
  cluster.execute(pq.physical);
  // within one round, each (src,dst,primitive) appears at most once
  std::map<std::tuple<int, std::uint32_t, std::uint32_t, std::string>, int> seen;
  for (const auto& e : cluster.message_log()) {
    if (e.primitive == "GetNeighborReply") continue;
    seen[{e.round, e.src, e.dst, e.primitive}]++;
  }
  int max_per = 0;
  for (const auto& [k, v] : seen) max_per = std::max(max_per, v);
  CHECK(max_per <= 2);  // a closure round runs two GetNeighbor waves
}

TEST_CASE("a lost message is detected, not tolerated") {
  LabeledGraph g = load_g0_placed(fig4_layout(), 5);
  PreparedQuery pq = prepare_query(g, "a(be|(cd)^+f)g", false);
  Cluster cluster(g, pq.logical.occs);
  cluster.inject_message_loss();
  CHECK_THROWS_AS(cluster.execute(pq.physical), LostMessageError);
}
