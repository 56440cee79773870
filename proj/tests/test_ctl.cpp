#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cosma;

namespace {

// three-state chain a0 -> a1 -> a2, a2 absorbing
System chain3() {
  std::vector<Node> nodes = {{"a0", {}}, {"a1", {}}, {"a2", {}}};
  std::vector<std::tuple<std::string, std::string, FormulaPtr>> edges = {
      {"a0", "a1", parse_formula("1")},
      {"a1", "a2", parse_formula("1")},
      {"a2", "a2", parse_formula("1")}};
  return System::make({make_machine("A", make_clg(nodes, edges), "a0")});
}

} // namespace

TEST_CASE("parse_ctl: the session formulas") {
  CtlPtr f = parse_ctl("AG !in(Invariant.Error)");
  REQUIRE(f->kind == Ctl::Kind::AG);
  REQUIRE(f->lhs->kind == Ctl::Kind::Not);
  REQUIRE(f->lhs->lhs->kind == Ctl::Kind::InState);
  CHECK(f->lhs->lhs->machine == "Invariant");
  CHECK(f->lhs->lhs->node == "Error");

  CtlPtr g = parse_ctl("AG AF in(Invariant.s0)");
  REQUIRE(g->kind == Ctl::Kind::AG);
  REQUIRE(g->lhs->kind == Ctl::Kind::AF);
  CHECK(g->lhs->lhs->kind == Ctl::Kind::InState);

  CtlPtr h = parse_ctl("E[ true U emits(msg_4) ]");
  REQUIRE(h->kind == Ctl::Kind::EU);
  CHECK(h->lhs->kind == Ctl::Kind::True);
  REQUIRE(h->rhs->kind == Ctl::Kind::Emits);
  CHECK(*h->rhs->symbol == Symbol("msg_4"));
}

TEST_CASE("parse_ctl: precedence via print") {
  CtlPtr f = parse_ctl("!in(M.a) | in(M.b) & in(M.c)");
  REQUIRE(f->kind == Ctl::Kind::Or);
  CHECK(f->lhs->kind == Ctl::Kind::Not);
  CHECK(f->rhs->kind == Ctl::Kind::And);

  // temporal operators bind tighter than binary connectives
  CtlPtr g = parse_ctl("AF in(M.a) & in(M.b)");
  REQUIRE(g->kind == Ctl::Kind::And);
  CHECK(g->lhs->kind == Ctl::Kind::AF);

  CHECK_THROWS_AS(parse_ctl(""), ParseError);
  CHECK_THROWS_AS(parse_ctl("AG"), ParseError);
  CHECK_THROWS_AS(parse_ctl("in(M)"), ParseError);
  CHECK_THROWS_AS(parse_ctl("E[ true U ]"), ParseError);
  CHECK_THROWS_AS(parse_ctl("XX in(M.a)"), ParseError);
}

TEST_CASE("print_ctl round-trips") {
  for (const char* text :
       {"AG !in(Invariant.Error)", "AG AF in(Invariant.s0)", "E[true U emits(msg_4)]",
        "A[in(M.a) U in(M.b)]", "!(in(M.a) | in(M.b)) & EX in(M.c)", "EF EG true",
        "AX false"}) {
    CtlPtr f = parse_ctl(text);
    CtlPtr g = parse_ctl(print_ctl(f));
    CHECK(print_ctl(f) == print_ctl(g));
  }
}

TEST_CASE("check: trivial verdicts") {
  ReachabilityGraph rg = build_product(chain3());
  CHECK(check(rg, *parse_ctl("AG true")).holds_at_initial);
  CHECK(!check(rg, *parse_ctl("AG false")).holds_at_initial);
  CHECK(check(rg, *parse_ctl("EF in(A.a2)")).holds_at_initial);
  CHECK(check(rg, *parse_ctl("A[true U in(A.a2)]")).holds_at_initial);
  CHECK(!check(rg, *parse_ctl("AG !in(A.a2)")).holds_at_initial);
  CHECK_THROWS_AS(check(rg, *parse_ctl("in(A.zz)")), CtlError);
  CHECK_THROWS_AS(check(rg, *parse_ctl("in(Nope.a0)")), CtlError);
}

TEST_CASE("check: EF on the driven processor") {
  System s = System::make({fixtures::starter(), fixtures::proc2()});
  ReachabilityGraph rg = build_product(s);
  CHECK(check(rg, *parse_ctl("EF in(Proc_2.Process)")).holds_at_initial);
  CHECK(check(rg, *parse_ctl("EF emits(doneProc_2)")).holds_at_initial);
}

TEST_CASE("check: deadlocks are an error unless patched") {
  std::vector<Node> nodes = {{"a", {}}, {"b", {}}};
  std::vector<std::tuple<std::string, std::string, FormulaPtr>> edges = {
      {"a", "b", parse_formula("1")}};
  System s = System::make({make_machine("M", make_clg(nodes, edges), "a")});
  ReachabilityGraph rg = build_product(s);
  REQUIRE(!rg.deadlocks.empty());

  CHECK_THROWS_AS(check(rg, *parse_ctl("AG true")), CtlError);

  CheckOptions opts;
  opts.allow_deadlock = true;
  CheckResult r = check(rg, *parse_ctl("AG true"), opts);
  CHECK(r.holds_at_initial);
  CHECK(r.deadlocks_patched);
  // the patched stutter loop keeps the deadlock state forever in b
  CheckResult r2 = check(rg, *parse_ctl("EF EG in(M.b)"), opts);
  CHECK(r2.holds_at_initial);
}

TEST_CASE("fair_states: vacuous coverage on a self-loop") {
  ReachabilityGraph rg = oracle::fabricate_graph(1, {{0, 0}}, 0, {{}});
  DynBitset fair = fair_states(rg);
  CHECK(fair.test(0));
}

TEST_CASE("fair_states: cycle omitting a mandatory member is unfair") {
  // 0 <-> 1 cycle with no member of set 0; separate state 2 with a
  // member self-loop, unreachable from the cycle
  ReachabilityGraph rg = oracle::fabricate_graph(
      3, {{0, 1}, {1, 0}, {2, 2}}, 1, {{}, {}, {0}});
  DynBitset fair = fair_states(rg);
  CHECK(!fair.test(0));
  CHECK(!fair.test(1));
  CHECK(fair.test(2));
}

TEST_CASE("fair_states: all states fair for the driven processor") {
  // close the environment: starter re-issues stProc_2 and relProc_2 cycles
  std::vector<Node> dn = {{"d0", {Symbol("stProc_2"), Symbol("relProc_2")}}};
  std::vector<std::tuple<std::string, std::string, FormulaPtr>> de = {
      {"d0", "d0", parse_formula("1")}};
  System s = System::make(
      {make_machine("Drv", make_clg(dn, de), "d0"), fixtures::proc2()});
  ReachabilityGraph rg = build_product(s);
  DynBitset fair = fair_states(rg);
  for (std::size_t i = 0; i < rg.states.size(); ++i) CHECK(fair.test(i));
  CHECK(oracle::to_stateset(fair) == oracle::fair_oracle(rg));
}

TEST_CASE("fairness discrimination: spontaneous exit is forced only under fairness") {
  System s = System::make({fixtures::starter(), fixtures::proc2()});
  ReachabilityGraph rg = build_product(s);
  CtlPtr f = parse_ctl("AF in(Proc_2.Put)");

  CheckResult plain = check(rg, *f);
  CheckOptions fopts;
  fopts.fair = true;
  CheckResult fair = check(rg, *f, fopts);

  int mi = s.machine_index("Proc_2");
  int process = s.machine(static_cast<std::size_t>(mi)).graph.node_index("Process");
  bool found = false;
  for (std::uint32_t i = 0; i < rg.states.size(); ++i) {
    if (rg.states[i][static_cast<std::size_t>(mi)] != process) continue;
    found = true;
    CHECK(!plain.satisfying.test(i)); // may idle on the ear forever
    CHECK(fair.satisfying.test(i));   // weak fairness forces the exit
  }
  CHECK(found);

  // monotonicity: fair AF is weaker to refute — superset of the plain set
  CHECK(fair.satisfying.contains(plain.satisfying));
}

TEST_CASE("witness: failed AG on a chain yields the shortest path") {
  ReachabilityGraph rg = build_product(chain3());
  CheckOptions opts;
  opts.want_witness = true;
  CheckResult r = check(rg, *parse_ctl("AG !in(A.a2)"), opts);
  CHECK(!r.holds_at_initial);
  REQUIRE(r.witness);
  CHECK(r.witness->kind == Trace::Kind::Path);
  CHECK(r.witness->prefix.size() == 2);
  CHECK(validate_trace(rg, *r.witness, false));
  // the path ends in the violating state
  CHECK(rg.edges[r.witness->prefix.back()].dst == 2);
}

TEST_CASE("witness: true EF yields a shortest path; true AG yields none") {
  ReachabilityGraph rg = build_product(chain3());
  CheckOptions opts;
  opts.want_witness = true;

  CheckResult ef = check(rg, *parse_ctl("EF in(A.a1)"), opts);
  CHECK(ef.holds_at_initial);
  REQUIRE(ef.witness);
  CHECK(ef.witness->prefix.size() == 1);
  CHECK(validate_trace(rg, *ef.witness, false));

  CheckResult ag = check(rg, *parse_ctl("AG true"), opts);
  CHECK(ag.holds_at_initial);
  CHECK(!ag.witness);
}

TEST_CASE("witness: failed fair AG AF produces a covering lasso") {
  // two loops: 0 <-> 1 (avoids p at both) and p-state 2; fairness set 0's
  // members include the 0 <-> 1 edges, so the starvation loop is fair
  ReachabilityGraph rg = oracle::fabricate_graph(
      3, {{0, 1}, {1, 0}, {0, 2}, {2, 0}}, 1, {{0}, {}, {}, {0}});
  CtlPtr f = parse_ctl("AG AF in(M.n2)");
  CheckOptions opts;
  opts.fair = true;
  opts.want_witness = true;
  CheckResult r = check(rg, *f, opts);
  CHECK(!r.holds_at_initial);
  REQUIRE(r.witness);
  CHECK(r.witness->kind == Trace::Kind::Lasso);
  CHECK(validate_trace(rg, *r.witness, true));
  // every cycle state avoids n2
  for (std::uint32_t e : r.witness->cycle) CHECK(rg.edges[e].dst != 2);
}

TEST_CASE("validate_trace rejects malformed traces") {
  ReachabilityGraph rg = build_product(chain3());
  Trace gap;
  gap.prefix = {1}; // does not start at the initial state
  CHECK(!validate_trace(rg, gap, false));

  Trace ok;
  ok.prefix = {0, 1};
  CHECK(validate_trace(rg, ok, false));

  Trace open_lasso;
  open_lasso.kind = Trace::Kind::Lasso;
  open_lasso.prefix = {0};
  open_lasso.cycle = {1}; // a1 -> a2 does not close on a1
  CHECK(!validate_trace(rg, open_lasso, false));

  // fair coverage: a lasso whose cycle misses a fairness set
  ReachabilityGraph fg = oracle::fabricate_graph(
      2, {{0, 1}, {1, 0}, {1, 1}}, 1, {{}, {}, {0}});
  Trace uncovered;
  uncovered.kind = Trace::Kind::Lasso;
  uncovered.prefix = {};
  uncovered.cycle = {0, 1};
  CHECK(validate_trace(fg, uncovered, false));
  CHECK(!validate_trace(fg, uncovered, true));
  Trace covered;
  covered.kind = Trace::Kind::Lasso;
  covered.prefix = {0};
  covered.cycle = {2};
  CHECK(validate_trace(fg, covered, true));
}

TEST_CASE("render_trace shows states and residuals") {
  System s = System::make({fixtures::proc2()});
  ReachabilityGraph rg = build_product(s);
  CheckOptions opts;
  opts.want_witness = true;
  CheckResult r = check(rg, *parse_ctl("EF in(Proc_2.Process)"), opts);
  REQUIRE(r.witness);
  std::string text = render_trace(rg, *r.witness);
  CHECK(text.find("(Ni)") != std::string::npos);
  CHECK(text.find("(Process)") != std::string::npos);
  CHECK(text.find("stProc_2") != std::string::npos);
}

TEST_CASE("check_on_the_fly agrees with the full check") {
  // violating case
  System s = System::make({fixtures::starter(), fixtures::proc2()});
  CtlPtr bad = parse_ctl("!in(Proc_2.Process)");
  OnTheFlyResult r = check_on_the_fly(s, *bad);
  CHECK(!r.result.holds_at_initial);
  REQUIRE(r.result.witness);
  CHECK(r.result.witness->prefix.size() >= 1);

  ReachabilityGraph rg = build_product(s);
  CtlPtr ag = parse_ctl("AG !in(Proc_2.Process)");
  CHECK(check(rg, *ag).holds_at_initial == r.result.holds_at_initial);

  // safe case: unreachable bad state explores fully and agrees
  CtlPtr safe = parse_ctl("!in(St.s0) | !in(Proc_2.Wait)");
  OnTheFlyResult r2 = check_on_the_fly(s, *safe);
  CHECK(r2.result.holds_at_initial);
  CHECK(r2.complete);
  CtlPtr ag2 = parse_ctl("AG (!in(St.s0) | !in(Proc_2.Wait))");
  CHECK(check(rg, *ag2).holds_at_initial);
}

TEST_CASE("check_on_the_fly: witness replays to the violation") {
  System s = System::make({fixtures::starter(), fixtures::proc2()});
  CtlPtr bad = parse_ctl("!in(Proc_2.Process)");
  OnTheFlyResult r = check_on_the_fly(s, *bad);
  REQUIRE(r.result.witness);
  // replay the prefix over the explored graph
  const ReachabilityGraph& g = r.explored;
  std::uint32_t at = g.initial;
  for (std::uint32_t e : r.result.witness->prefix) {
    REQUIRE(g.edges[e].src == at);
    at = g.edges[e].dst;
  }
  int mi = s.machine_index("Proc_2");
  int process = s.machine(static_cast<std::size_t>(mi)).graph.node_index("Process");
  CHECK(g.states[at][static_cast<std::size_t>(mi)] == process);
  // BFS finds a shallow violation quickly: layers <= depth + 1
  CHECK(r.layers_expanded <= r.result.witness->prefix.size() + 1);
}

TEST_CASE("property: plain semantics matches the naive reference (sample)") {
  std::mt19937 rng(1234);
  for (int it = 0; it < 80; ++it) {
    ReachabilityGraph rg = oracle::random_graph(rng, 24);
    int n = static_cast<int>(rg.states.size());
    CtlPtr f = oracle::random_ctl(rng, n, 3, /*wide=*/true);
    CheckResult got = check(rg, *f);
    oracle::StateSet want = oracle::eval_ref(rg, *f);
    CHECK_MESSAGE(oracle::to_stateset(got.satisfying) == want, print_ctl(f));
    CHECK(got.holds_at_initial == static_cast<bool>(want[rg.initial]));
  }
}

TEST_CASE("property: fair semantics matches the brute-force reference (sample)") {
  std::mt19937 rng(5678);
  CheckOptions opts;
  opts.fair = true;
  for (int it = 0; it < 60; ++it) {
    ReachabilityGraph rg = oracle::random_graph(rng, 8, 3);
    CHECK(oracle::to_stateset(fair_states(rg)) == oracle::fair_oracle(rg));
    int n = static_cast<int>(rg.states.size());
    CtlPtr f = oracle::random_ctl(rng, n, 3, /*wide=*/true);
    CheckResult got = check(rg, *f, opts);
    oracle::StateSet want = oracle::eval_fair_ref(rg, *f);
    CHECK_MESSAGE(oracle::to_stateset(got.satisfying) == want, print_ctl(f));
  }
}

TEST_CASE("property: AG duality and fairness monotonicity") {
  std::mt19937 rng(31337);
  CheckOptions fair_opts;
  fair_opts.fair = true;
  for (int it = 0; it < 40; ++it) {
    ReachabilityGraph rg = oracle::random_graph(rng, 16, 2);
    int n = static_cast<int>(rg.states.size());
    CtlPtr p = oracle::random_ctl(rng, n, 2);
    CtlPtr ag = Ctl::make(Ctl::Kind::AG, p);
    CtlPtr dual = Ctl::make(
        Ctl::Kind::Not, Ctl::make(Ctl::Kind::EF, Ctl::make(Ctl::Kind::Not, p)));
    CHECK(check(rg, *ag).satisfying == check(rg, *dual).satisfying);

    CtlPtr af = Ctl::make(Ctl::Kind::AF, p);
    CheckResult plain = check(rg, *af);
    CheckResult fair = check(rg, *af, fair_opts);
    CHECK(fair.satisfying.contains(plain.satisfying));
  }
}
