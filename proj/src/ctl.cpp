#include "cosma/ctl.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <unordered_map>

namespace cosma {

CtlPtr Ctl::make(Kind k, CtlPtr l, CtlPtr r) {
  auto f = std::make_shared<Ctl>();
  f->kind = k;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

CtlPtr Ctl::make_in(std::string machine, std::string node) {
  auto f = std::make_shared<Ctl>();
  f->kind = Kind::InState;
  f->machine = std::move(machine);
  f->node = std::move(node);
  return f;
}

CtlPtr Ctl::make_emits(Symbol s) {
  auto f = std::make_shared<Ctl>();
  f->kind = Kind::Emits;
  f->symbol = s;
  return f;
}

bool Ctl::is_state_predicate() const {
  switch (kind) {
    case Kind::True:
    case Kind::False:
    case Kind::InState:
    case Kind::Emits:
      return true;
    case Kind::Not:
      return lhs->is_state_predicate();
    case Kind::And:
    case Kind::Or:
      return lhs->is_state_predicate() && rhs->is_state_predicate();
    default:
      return false;
  }
}

namespace {

class CtlParser {
public:
  explicit CtlParser(std::string_view text) : text_(text) {}

  CtlPtr parse() {
    CtlPtr f = parse_or();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected trailing input");
    return f;
  }

private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError("CTL: " + msg, 1, static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  // peek the next word without consuming
  std::string peek_word() {
    skip_ws();
    std::size_t p = pos_;
    std::size_t start = p;
    while (p < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_'))
      ++p;
    return std::string(text_.substr(start, p - start));
  }

  CtlPtr parse_or() {
    CtlPtr f = parse_and();
    while (eat('|')) f = Ctl::make(Ctl::Kind::Or, f, parse_and());
    return f;
  }

  CtlPtr parse_and() {
    CtlPtr f = parse_unary();
    while (eat('&')) f = Ctl::make(Ctl::Kind::And, f, parse_unary());
    return f;
  }

  CtlPtr parse_unary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected formula");
    if (eat('!')) return Ctl::make(Ctl::Kind::Not, parse_unary());
    if (eat('(')) {
      CtlPtr f = parse_or();
      expect(')');
      return f;
    }
    std::string w = peek_word();
    if (w.empty()) fail("expected formula");

    static const std::unordered_map<std::string, Ctl::Kind> unary = {
        {"AG", Ctl::Kind::AG}, {"AF", Ctl::Kind::AF}, {"AX", Ctl::Kind::AX},
        {"EG", Ctl::Kind::EG}, {"EF", Ctl::Kind::EF}, {"EX", Ctl::Kind::EX}};
    if (auto it = unary.find(w); it != unary.end()) {
      pos_ += w.size();
      return Ctl::make(it->second, parse_unary());
    }
    if (w == "A" || w == "E") {
      pos_ += w.size();
      expect('[');
      CtlPtr lhs = parse_or();
      skip_ws();
      std::string u = peek_word();
      if (u != "U") fail("expected 'U'");
      pos_ += 1;
      CtlPtr rhs = parse_or();
      expect(']');
      return Ctl::make(w == "A" ? Ctl::Kind::AU : Ctl::Kind::EU, lhs, rhs);
    }
    if (w == "true") {
      pos_ += w.size();
      return Ctl::make(Ctl::Kind::True);
    }
    if (w == "false") {
      pos_ += w.size();
      return Ctl::make(Ctl::Kind::False);
    }
    if (w == "in") {
      pos_ += w.size();
      expect('(');
      std::string machine = ident();
      expect('.');
      std::string node = ident();
      expect(')');
      return Ctl::make_in(std::move(machine), std::move(node));
    }
    if (w == "emits") {
      pos_ += w.size();
      expect('(');
      Symbol s{ident()};
      expect(')');
      return Ctl::make_emits(s);
    }
    fail("unknown operator or atom '" + w + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print_rec(const Ctl& f, std::string& out, int parent_prec) {
  // precedence: atoms/temporal (3) > ! (3) > & (2) > | (1)
  auto unary = [&](const char* op) {
    out += op;
    out += ' ';
    print_rec(*f.lhs, out, 3);
  };
  switch (f.kind) {
    case Ctl::Kind::True: out += "true"; return;
    case Ctl::Kind::False: out += "false"; return;
    case Ctl::Kind::InState:
      out += "in(" + f.machine + "." + f.node + ")";
      return;
    case Ctl::Kind::Emits:
      out += "emits(" + f.symbol->name() + ")";
      return;
    case Ctl::Kind::Not:
      out += '!';
      print_rec(*f.lhs, out, 3);
      return;
    case Ctl::Kind::AG: unary("AG"); return;
    case Ctl::Kind::AF: unary("AF"); return;
    case Ctl::Kind::AX: unary("AX"); return;
    case Ctl::Kind::EG: unary("EG"); return;
    case Ctl::Kind::EF: unary("EF"); return;
    case Ctl::Kind::EX: unary("EX"); return;
    case Ctl::Kind::AU:
    case Ctl::Kind::EU:
      out += (f.kind == Ctl::Kind::AU) ? "A[ " : "E[ ";
      print_rec(*f.lhs, out, 0);
      out += " U ";
      print_rec(*f.rhs, out, 0);
      out += " ]";
      return;
    case Ctl::Kind::And: {
      bool paren = parent_prec > 2;
      if (paren) out += '(';
      print_rec(*f.lhs, out, 2);
      out += " & ";
      print_rec(*f.rhs, out, 2);
      if (paren) out += ')';
      return;
    }
    case Ctl::Kind::Or: {
      bool paren = parent_prec > 1;
      if (paren) out += '(';
      print_rec(*f.lhs, out, 1);
      out += " | ";
      print_rec(*f.rhs, out, 1);
      if (paren) out += ')';
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// evaluation

struct SccInfo {
  std::vector<int> scc_id; // -1 outside the domain
  std::size_t scc_count = 0;
  std::vector<bool> qualifying;                       // per SCC
  std::vector<std::vector<std::uint32_t>> scc_edges;  // internal edges per SCC
};

// Tarjan over the subgraph induced by `domain`. An SCC qualifies when it has
// at least one internal edge and those edges together cover every fairness
// set.
SccInfo scc_decompose(const ReachabilityGraph& rg, const DynBitset& domain) {
  const std::size_t n = rg.states.size();
  SccInfo info;
  info.scc_id.assign(n, -1);

  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  int next_index = 0;

  struct Frame {
    std::uint32_t v;
    std::size_t ei; // position in out_edges[v]
  };

  for (std::uint32_t root = 0; root < n; ++root) {
    if (!domain.test(root) || index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& fr = frames.back();
      if (fr.ei < rg.out_edges[fr.v].size()) {
        std::uint32_t e = rg.out_edges[fr.v][fr.ei++];
        std::uint32_t w = rg.edges[e].dst;
        if (!domain.test(w)) continue;
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
      } else {
        std::uint32_t v = fr.v;
        frames.pop_back();
        if (!frames.empty())
          low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        if (low[v] == index[v]) {
          int id = static_cast<int>(info.scc_count++);
          std::uint32_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            info.scc_id[w] = id;
          } while (w != v);
        }
      }
    }
  }

  const std::size_t nsets = rg.fairness.size();
  info.scc_edges.assign(info.scc_count, {});
  std::vector<DynBitset> covered(info.scc_count, DynBitset(nsets));
  std::vector<bool> nontrivial(info.scc_count, false);
  for (std::uint32_t e = 0; e < rg.edges.size(); ++e) {
    std::uint32_t s = rg.edges[e].src, d = rg.edges[e].dst;
    if (!domain.test(s) || !domain.test(d)) continue;
    if (info.scc_id[s] >= 0 && info.scc_id[s] == info.scc_id[d]) {
      auto id = static_cast<std::size_t>(info.scc_id[s]);
      info.scc_edges[id].push_back(e);
      covered[id] |= rg.edge_fairness[e];
      nontrivial[id] = true;
    }
  }
  info.qualifying.assign(info.scc_count, false);
  for (std::size_t id = 0; id < info.scc_count; ++id)
    info.qualifying[id] = nontrivial[id] && covered[id].all();
  return info;
}

struct Evaluator {
  const ReachabilityGraph& rg;
  bool fair;
  DynBitset fair_set; // empty-size placeholder when !fair

  std::size_t n() const { return rg.states.size(); }

  DynBitset pre(const DynBitset& target) const {
    DynBitset out(n());
    for (const auto& e : rg.edges)
      if (target.test(e.dst)) out.set(e.src);
    return out;
  }

  DynBitset atom_in(const Ctl& f) const {
    int mi = rg.system.machine_index(f.machine);
    if (mi < 0) throw CtlError("in(): unknown machine '" + f.machine + "'");
    int ni = rg.system.machine(static_cast<std::size_t>(mi)).graph.node_index(f.node);
    if (ni < 0)
      throw CtlError("in(): machine '" + f.machine + "' has no node '" + f.node + "'");
    DynBitset out(n());
    for (std::size_t s = 0; s < n(); ++s)
      if (rg.states[s][static_cast<std::size_t>(mi)] == ni) out.set(s);
    return out;
  }

  DynBitset atom_emits(Symbol sym) const {
    DynBitset out(n());
    for (std::size_t s = 0; s < n(); ++s)
      if (rg.system.emitted(rg.states[s]).count(sym)) out.set(s);
    return out;
  }

  DynBitset eu(const DynBitset& phi, const DynBitset& psi) const {
    DynBitset seed = psi;
    if (fair) seed &= fair_set;
    DynBitset z = seed;
    std::deque<std::uint32_t> work;
    for (std::uint32_t s = 0; s < n(); ++s)
      if (z.test(s)) work.push_back(s);
    while (!work.empty()) {
      std::uint32_t s = work.front();
      work.pop_front();
      for (std::uint32_t e : rg.in_edges[s]) {
        std::uint32_t p = rg.edges[e].src;
        if (!z.test(p) && phi.test(p)) {
          z.set(p);
          work.push_back(p);
        }
      }
    }
    return z;
  }

  DynBitset eg_plain(const DynBitset& phi) const {
    DynBitset z = phi;
    bool changed = true;
    while (changed) {
      changed = false;
      DynBitset keep(n());
      for (const auto& e : rg.edges)
        if (z.test(e.src) && z.test(e.dst)) keep.set(e.src);
      keep &= z;
      if (!(keep == z)) {
        z = keep;
        changed = true;
      }
    }
    return z;
  }

  // states with a fair path staying in phi forever: reach, inside phi, an
  // SCC of the phi-subgraph that covers every fairness set
  DynBitset eg_fair(const DynBitset& phi) const {
    SccInfo info = scc_decompose(rg, phi);
    DynBitset seeds(n());
    for (std::uint32_t s = 0; s < n(); ++s)
      if (info.scc_id[s] >= 0 && info.qualifying[static_cast<std::size_t>(info.scc_id[s])])
        seeds.set(s);
    return eu(phi, seeds);
  }

  DynBitset ex(const DynBitset& phi) const {
    DynBitset target = phi;
    if (fair) target &= fair_set;
    return pre(target);
  }

  DynBitset eg(const DynBitset& phi) const { return fair ? eg_fair(phi) : eg_plain(phi); }

  DynBitset eval(const Ctl& f) const {
    switch (f.kind) {
      case Ctl::Kind::True: return DynBitset(n(), true);
      case Ctl::Kind::False: return DynBitset(n());
      case Ctl::Kind::InState: return atom_in(f);
      case Ctl::Kind::Emits: return atom_emits(*f.symbol);
      case Ctl::Kind::Not: return ~eval(*f.lhs);
      case Ctl::Kind::And: return eval(*f.lhs) & eval(*f.rhs);
      case Ctl::Kind::Or: return eval(*f.lhs) | eval(*f.rhs);
      case Ctl::Kind::EX: return ex(eval(*f.lhs));
      case Ctl::Kind::EG: return eg(eval(*f.lhs));
      case Ctl::Kind::EU: return eu(eval(*f.lhs), eval(*f.rhs));
      case Ctl::Kind::EF: return eu(DynBitset(n(), true), eval(*f.lhs));
      case Ctl::Kind::AX: return ~ex(~eval(*f.lhs));
      case Ctl::Kind::AF: return ~eg(~eval(*f.lhs));
      case Ctl::Kind::AG: return ~eu(DynBitset(n(), true), ~eval(*f.lhs));
      case Ctl::Kind::AU: {
        // A[p U q] = !( E[!q U (!p & !q)] | EG !q )
        DynBitset p = eval(*f.lhs), q = eval(*f.rhs);
        DynBitset nq = ~q;
        return ~(eu(nq, nq & ~p) | eg(nq));
      }
    }
    return DynBitset(n());
  }
};

ReachabilityGraph patch_deadlocks(const ReachabilityGraph& rg) {
  ReachabilityGraph patched = rg;
  const std::size_t nsets = rg.fairness.size();
  for (std::uint32_t s : rg.deadlocks) {
    ProductEdge stutter;
    stutter.src = stutter.dst = s;
    stutter.residual = Formula::make_true();
    stutter.choices.assign(rg.system.size(), -1);
    auto ei = static_cast<std::uint32_t>(patched.edges.size());
    patched.edges.push_back(std::move(stutter));
    // stutter loops belong to no fairness set
    patched.edge_fairness.push_back(DynBitset(nsets));
    patched.out_edges[s].push_back(ei);
    patched.in_edges[s].push_back(ei);
  }
  patched.deadlocks.clear();
  return patched;
}

std::vector<std::uint32_t> bfs_edge_path(const ReachabilityGraph& rg, std::uint32_t from,
                                         const DynBitset& targets, const DynBitset* domain) {
  std::vector<std::int64_t> parent_edge(rg.states.size(), -1);
  std::vector<bool> seen(rg.states.size(), false);
  std::deque<std::uint32_t> work{from};
  seen[from] = true;
  std::int64_t found = targets.test(from) ? static_cast<std::int64_t>(from) : -1;
  while (!work.empty() && found < 0) {
    std::uint32_t v = work.front();
    work.pop_front();
    for (std::uint32_t e : rg.out_edges[v]) {
      std::uint32_t w = rg.edges[e].dst;
      if (domain && !domain->test(w)) continue;
      if (seen[w]) continue;
      seen[w] = true;
      parent_edge[w] = static_cast<std::int64_t>(e);
      if (targets.test(w)) {
        found = static_cast<std::int64_t>(w);
        break;
      }
      work.push_back(w);
    }
  }
  if (found < 0) throw CtlError("internal: witness target unreachable");
  std::vector<std::uint32_t> path;
  std::uint32_t v = static_cast<std::uint32_t>(found);
  while (v != from) {
    std::uint32_t e = static_cast<std::uint32_t>(parent_edge[v]);
    path.push_back(e);
    v = rg.edges[e].src;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// nonempty closed walk at `anchor` inside SCC `id`, traversing a member of
// every fairness set
std::vector<std::uint32_t> covering_cycle(const ReachabilityGraph& rg, const SccInfo& info,
                                          int id, std::uint32_t anchor) {
  DynBitset domain(rg.states.size());
  for (std::uint32_t s = 0; s < rg.states.size(); ++s)
    if (info.scc_id[s] == id) domain.set(s);

  const std::size_t nsets = rg.fairness.size();
  DynBitset covered(nsets);
  std::vector<std::uint32_t> cycle;
  std::uint32_t cur = anchor;

  auto goto_state = [&](std::uint32_t target) {
    DynBitset t(rg.states.size());
    t.set(target);
    if (cur == target) return;
    auto seg = bfs_edge_path(rg, cur, t, &domain);
    cycle.insert(cycle.end(), seg.begin(), seg.end());
    cur = target;
  };

  for (std::size_t k = 0; k < nsets; ++k) {
    if (covered.test(k)) continue;
    // any internal member edge of set k
    std::uint32_t member = 0;
    bool ok = false;
    for (std::uint32_t e : info.scc_edges[static_cast<std::size_t>(id)])
      if (rg.edge_fairness[e].test(k)) {
        member = e;
        ok = true;
        break;
      }
    if (!ok) throw CtlError("internal: SCC lost fairness coverage");
    goto_state(rg.edges[member].src);
    cycle.push_back(member);
    covered |= rg.edge_fairness[member];
    cur = rg.edges[member].dst;
  }
  if (cycle.empty()) {
    // no fairness sets: take any internal edge and come back
    std::uint32_t e = info.scc_edges[static_cast<std::size_t>(id)].front();
    goto_state(rg.edges[e].src);
    cycle.push_back(e);
    cur = rg.edges[e].dst;
  }
  goto_state(anchor);
  return cycle;
}

} // namespace

CtlPtr parse_ctl(std::string_view text) { return CtlParser(text).parse(); }

std::string print_ctl(const Ctl& f) {
  std::string out;
  print_rec(f, out, 0);
  return out;
}

ReachabilityGraph with_stutter_loops(const ReachabilityGraph& rg) { return patch_deadlocks(rg); }

DynBitset fair_states(const ReachabilityGraph& rg) {
  DynBitset all(rg.states.size(), true);
  SccInfo info = scc_decompose(rg, all);
  DynBitset seeds(rg.states.size());
  for (std::uint32_t s = 0; s < rg.states.size(); ++s)
    if (info.scc_id[s] >= 0 && info.qualifying[static_cast<std::size_t>(info.scc_id[s])])
      seeds.set(s);
  Evaluator ev{rg, false, DynBitset()};
  return ev.eu(all, seeds);
}

CheckResult check(const ReachabilityGraph& rg, const Ctl& f, const CheckOptions& opts) {
  if (!rg.complete)
    throw CtlError("cannot check a truncated reachability graph (exploration cap hit)");

  const ReachabilityGraph* use = &rg;
  ReachabilityGraph patched;
  CheckResult result;
  if (!rg.deadlocks.empty()) {
    if (!opts.allow_deadlock) {
      std::string msg = "graph has deadlock states:";
      for (std::uint32_t s : rg.deadlocks) msg += " " + rg.state_name(s);
      throw CtlError(msg);
    }
    patched = patch_deadlocks(rg);
    use = &patched;
    result.deadlocks_patched = true;
  }

  Evaluator ev{*use, opts.fair, opts.fair ? fair_states(*use) : DynBitset()};
  result.satisfying = ev.eval(f);
  result.satisfying_complete = true;
  result.holds_at_initial = result.satisfying.test(use->initial);
  if (opts.want_witness && !result.witness)
    result.witness = witness(*use, f, result, opts.fair);
  return result;
}

std::optional<Trace> witness(const ReachabilityGraph& rg, const Ctl& f,
                             const CheckResult& result, bool fair) {
  const ReachabilityGraph* use = &rg;
  ReachabilityGraph patched;
  if (!rg.deadlocks.empty() && result.deadlocks_patched) {
    patched = patch_deadlocks(rg);
    use = &patched;
  }
  Evaluator ev{*use, fair, fair ? fair_states(*use) : DynBitset()};

  // failed AG p: shortest path to a !p state
  if (f.kind == Ctl::Kind::AG && !result.holds_at_initial) {
    const Ctl& p = *f.lhs;
    if (fair && p.kind == Ctl::Kind::AF) {
      // failed AG AF q: fair lasso staying in !q
      DynBitset not_q = ~ev.eval(*p.lhs);
      SccInfo info = scc_decompose(*use, not_q);
      DynBitset seeds(use->states.size());
      for (std::uint32_t s = 0; s < use->states.size(); ++s)
        if (info.scc_id[s] >= 0 && info.qualifying[static_cast<std::size_t>(info.scc_id[s])])
          seeds.set(s);
      if (seeds.none()) return std::nullopt;
      Trace t;
      t.kind = Trace::Kind::Lasso;
      t.prefix = bfs_edge_path(*use, use->initial, seeds, nullptr);
      std::uint32_t anchor =
          t.prefix.empty() ? use->initial : use->edges[t.prefix.back()].dst;
      t.cycle = covering_cycle(*use, info, info.scc_id[anchor], anchor);
      return t;
    }
    DynBitset bad = ~ev.eval(p);
    if (bad.none()) return std::nullopt;
    Trace t;
    t.prefix = bfs_edge_path(*use, use->initial, bad, nullptr);
    return t;
  }

  // true EF p: shortest path to a p state
  if (f.kind == Ctl::Kind::EF && result.holds_at_initial) {
    DynBitset good = ev.eval(*f.lhs);
    if (fair) good &= ev.fair_set;
    if (good.none()) return std::nullopt;
    Trace t;
    t.prefix = bfs_edge_path(*use, use->initial, good, nullptr);
    return t;
  }

  return std::nullopt;
}

bool validate_trace(const ReachabilityGraph& rg, const Trace& t, bool require_fair_coverage) {
  auto edge_ok = [&](std::uint32_t e) { return e < rg.edges.size(); };
  std::uint32_t cur = rg.initial;
  for (std::uint32_t e : t.prefix) {
    if (!edge_ok(e) || rg.edges[e].src != cur) return false;
    cur = rg.edges[e].dst;
  }
  if (t.kind == Trace::Kind::Path) return t.cycle.empty();
  if (t.cycle.empty()) return false;
  std::uint32_t anchor = cur;
  DynBitset covered(rg.fairness.size());
  for (std::uint32_t e : t.cycle) {
    if (!edge_ok(e) || rg.edges[e].src != cur) return false;
    covered |= rg.edge_fairness[e];
    cur = rg.edges[e].dst;
  }
  if (cur != anchor) return false;
  if (require_fair_coverage && !covered.all()) return false;
  return true;
}

std::string render_trace(const ReachabilityGraph& rg, const Trace& t) {
  std::string out;
  auto emit = [&](const std::vector<std::uint32_t>& edges, const char* head) {
    out += head;
    for (std::uint32_t e : edges) {
      out += "  " + rg.state_name(rg.edges[e].src) + "  --[" +
             print_formula(rg.edges[e].residual) + "]-->  " + rg.state_name(rg.edges[e].dst) +
             "\n";
    }
  };
  if (t.prefix.empty())
    out += "prefix: (starts at initial state " + rg.state_name(rg.initial) + ")\n";
  else
    emit(t.prefix, "prefix:\n");
  if (t.kind == Trace::Kind::Lasso) emit(t.cycle, "cycle (repeat forever):\n");
  return out;
}

namespace {

bool eval_state_pred(const System& s, const GlobalState& g, const SymbolSet& emitted,
                     const Ctl& p) {
  switch (p.kind) {
    case Ctl::Kind::True: return true;
    case Ctl::Kind::False: return false;
    case Ctl::Kind::InState: {
      int mi = s.machine_index(p.machine);
      if (mi < 0) throw CtlError("in(): unknown machine '" + p.machine + "'");
      int ni = s.machine(static_cast<std::size_t>(mi)).graph.node_index(p.node);
      if (ni < 0)
        throw CtlError("in(): machine '" + p.machine + "' has no node '" + p.node + "'");
      return g[static_cast<std::size_t>(mi)] == ni;
    }
    case Ctl::Kind::Emits: return emitted.count(*p.symbol) != 0;
    case Ctl::Kind::Not: return !eval_state_pred(s, g, emitted, *p.lhs);
    case Ctl::Kind::And:
      return eval_state_pred(s, g, emitted, *p.lhs) && eval_state_pred(s, g, emitted, *p.rhs);
    case Ctl::Kind::Or:
      return eval_state_pred(s, g, emitted, *p.lhs) || eval_state_pred(s, g, emitted, *p.rhs);
    default:
      throw CtlError("on-the-fly check requires a temporal-operator-free predicate");
  }
}

struct GsHash {
  std::size_t operator()(const GlobalState& g) const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (auto v : g) h = (h ^ static_cast<std::size_t>(v)) * 0x100000001b3ull;
    return h;
  }
};

} // namespace

OnTheFlyResult check_on_the_fly(const System& s, const Ctl& p, const ProductCaps& caps) {
  if (!p.is_state_predicate())
    throw CtlError("on-the-fly check requires a temporal-operator-free predicate");

  OnTheFlyResult out;
  ReachabilityGraph& rg = out.explored;
  rg.system = s;

  std::unordered_map<GlobalState, std::uint32_t, GsHash> index;
  std::vector<std::int64_t> parent_edge;
  std::vector<std::size_t> depth;
  std::deque<std::uint32_t> work;

  auto intern = [&](const GlobalState& g, std::int64_t via, std::size_t d) {
    auto [it, inserted] = index.try_emplace(g, static_cast<std::uint32_t>(rg.states.size()));
    if (inserted) {
      rg.states.push_back(g);
      rg.out_edges.push_back({});
      rg.in_edges.push_back({});
      parent_edge.push_back(via);
      depth.push_back(d);
    }
    return std::pair{it->second, inserted};
  };

  GlobalState init = s.initial_state();
  rg.initial = intern(init, -1, 0).first;
  work.push_back(rg.initial);

  std::int64_t violation = -1;
  if (!eval_state_pred(s, init, s.emitted(init), p))
    violation = static_cast<std::int64_t>(rg.initial);

  while (!work.empty() && violation < 0) {
    std::uint32_t si = work.front();
    work.pop_front();
    out.layers_expanded = std::max(out.layers_expanded, depth[si] + 1);
    GlobalState g = rg.states[si];
    for (ProductEdge& pe : successors(s, g)) {
      if (rg.edges.size() >= caps.max_edges || rg.states.size() > caps.max_states) {
        out.complete = false;
        break;
      }
      GlobalState dst(s.size());
      for (std::size_t m = 0; m < s.size(); ++m)
        dst[m] = s.machine(m).graph.edges[static_cast<std::size_t>(pe.choices[m])].dst;
      pe.src = si;
      auto ei = static_cast<std::uint32_t>(rg.edges.size());
      auto [di, fresh] = intern(dst, static_cast<std::int64_t>(ei), depth[si] + 1);
      pe.dst = di;
      rg.out_edges[si].push_back(ei);
      rg.in_edges[di].push_back(ei);
      rg.edges.push_back(std::move(pe));
      rg.edge_fairness.push_back(DynBitset(0));
      if (fresh && !eval_state_pred(s, dst, s.emitted(dst), p)) {
        violation = static_cast<std::int64_t>(di);
        break;
      }
      if (fresh) work.push_back(di);
    }
    if (!out.complete) break;
  }

  rg.complete = out.complete && violation < 0;
  out.result.satisfying = DynBitset(rg.states.size(), violation < 0 && out.complete);
  out.result.satisfying_complete = violation < 0 && out.complete;
  out.result.holds_at_initial = violation < 0 && out.complete;
  if (violation >= 0) {
    Trace t;
    std::uint32_t v = static_cast<std::uint32_t>(violation);
    while (parent_edge[v] >= 0) {
      t.prefix.push_back(static_cast<std::uint32_t>(parent_edge[v]));
      v = rg.edges[static_cast<std::size_t>(parent_edge[v])].src;
    }
    std::reverse(t.prefix.begin(), t.prefix.end());
    out.result.witness = std::move(t);
  }
  return out;
}

} // namespace cosma
