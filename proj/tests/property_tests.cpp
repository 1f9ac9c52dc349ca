#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "tydb/explain.hpp"
#include "tydb/solver.hpp"

using namespace tydb;

namespace {

struct ErrorCase {
  std::string file, ref;
};

const std::vector<ErrorCase> kErrorCases = {
    {"stack.hs", "idStack"}, {"plot_original.hs", "plot;doRow"}, {"plot_original.hs", "plot"},
    {"plot_fix2.hs", "plot"}, {"merge.hs", "merge"},              {"collect.hs", "f"},
    {"div.hs", "f"},         {"realprog.hs", "f"},
};

const std::vector<std::string> kWellTyped = {"reverse.hs", "plot_fixed.hs", "normalize.hs", "misc.hs"};

std::string mode_name(Mode m) { return m == Mode::Local ? "local" : "global"; }

// RefPath of every binding name of the program, outermost first.
std::vector<std::string> all_refs(const Program& p) {
  std::vector<std::string> out;
  for (const auto& n : p.names()) {
    std::vector<std::string> segs{n.name};
    for (int b = p.bindings()[n.binding].parent; b >= 0; b = p.bindings()[b].parent) {
      segs.push_back(p.names()[p.bindings()[b].names[0]].name);
    }
    std::reverse(segs.begin(), segs.end());
    std::string ref;
    for (const auto& s : segs) ref += (ref.empty() ? "" : ";") + s;
    out.push_back(ref);
  }
  return out;
}

}  // namespace

// (1) every reported conflict is a minimal unsatisfiable subset
TEST(MusContract, ErrorPrograms) {
  for (const auto& c : kErrorCases) {
    for (Mode m : {Mode::Local, Mode::Global}) {
      SCOPED_TRACE(c.file + " " + c.ref + " " + mode_name(m));
      auto s = oracle::open_session(c.file);
      ConstraintSet cs = oracle::constraints_for(s->program(), m, c.ref);
      const Env& env = s->program().env();
      ASSERT_FALSE(satisfiable(cs, {}, env));
      std::vector<int> mus = find_mus(cs, env);
      EXPECT_TRUE(oracle::is_mus(cs, env, mus));
    }
  }
}

// find_mus picks one of the MUSes and the common part is their
// intersection, on the programs small enough to enumerate.
TEST(MusContract, ProgramsAgainstEnumeration) {
  const std::vector<ErrorCase> small = {
      {"stack.hs", "idStack"}, {"collect.hs", "f"}, {"div.hs", "f"}, {"realprog.hs", "f"}};
  for (const auto& c : small) {
    SCOPED_TRACE(c.file);
    auto s = oracle::open_session(c.file);
    ConstraintSet cs = oracle::constraints_for(s->program(), Mode::Local, c.ref);
    const Env& env = s->program().env();
    auto all = oracle::muses_by_tree(cs, env);
    std::vector<int> mus = find_mus(cs, env);
    EXPECT_NE(std::find(all.begin(), all.end(), mus), all.end());
    EXPECT_EQ(common_conflict_constraints(cs, env, mus), oracle::intersection(all));
  }
}

// merge has too many conflicts to enumerate; check the common part against
// the removal characterization and against randomly shrunk conflicts.
TEST(MusContract, MergeCommonPart) {
  auto s = oracle::open_session("merge.hs");
  ConstraintSet cs = oracle::constraints_for(s->program(), Mode::Local, "merge");
  const Env& env = s->program().env();
  std::vector<int> mus = find_mus(cs, env);
  std::vector<int> common = common_conflict_constraints(cs, env, mus);
  EXPECT_FALSE(common.empty());
  EXPECT_EQ(common, oracle::common_by_removal(cs, env));
  auto sampled = oracle::sample_muses(cs, env, 200, 3);
  EXPECT_GT(sampled.size(), 1u);
  for (const auto& m : sampled) {
    EXPECT_TRUE(oracle::is_mus(cs, env, m));
    EXPECT_TRUE(std::includes(m.begin(), m.end(), common.begin(), common.end()));
  }
}

// (2) random constraint sets against exhaustive subset enumeration
TEST(MusOracle, RandomSets) {
  oracle::RandomSets gen(2024);
  const Env& env = oracle::rules_env();
  int tested = 0, tries = 0;
  while (tested < 200 && tries < 20000) {
    ++tries;
    ConstraintSet cs = gen.make(12);
    if (satisfiable(cs, {}, env)) continue;
    ++tested;
    auto all = oracle::muses_by_subsets(cs, env);
    ASSERT_FALSE(all.empty());
    std::vector<int> mus = find_mus(cs, env);
    EXPECT_NE(std::find(all.begin(), all.end(), mus), all.end()) << "set " << tested;
    std::vector<int> common = common_conflict_constraints(cs, env, mus);
    std::vector<int> want = oracle::intersection(all);
    EXPECT_EQ(common, want) << "set " << tested;
    EXPECT_EQ(locs_of(cs.constraints, common), locs_of(cs.constraints, want));
  }
  EXPECT_EQ(tested, 200);
}

// (3) local and global explanation modes agree on well-typed programs
TEST(ModeAgreement, WellTypedCorpus) {
  for (const auto& file : kWellTyped) {
    auto s = oracle::open_session(file);
    const Program& p = s->program();
    for (const auto& ref : all_refs(p)) {
      SCOPED_TRACE(file + " " + ref);
      ConstraintSet local = oracle::constraints_for(p, Mode::Local, ref);
      ConstraintSet global = oracle::constraints_for(p, Mode::Global, ref);
      EXPECT_EQ(satisfiable(local, {}, p.env()), satisfiable(global, {}, p.env()));
      s->mode = Mode::Local;
      QueryResult a = s->type_of(ref);
      s->mode = Mode::Global;
      QueryResult b = s->type_of(ref);
      ASSERT_EQ(a.status, b.status) << a.text << b.text;
      if (a.status != QueryResult::Status::Ok) continue;
      EXPECT_TRUE(alpha_equal(s->parse_pattern(a.scheme).scheme, s->parse_pattern(b.scheme).scheme))
          << a.scheme << " vs " << b.scheme;
    }
  }
}

TEST(ModeAgreement, WellTypedBindingsOfIllTypedPrograms) {
  auto s = oracle::open_session("stack.hs");
  for (const char* ref : {"push", "pop", "empty"}) {
    SCOPED_TRACE(ref);
    s->mode = Mode::Local;
    QueryResult a = s->type_of(ref);
    s->mode = Mode::Global;
    QueryResult b = s->type_of(ref);
    ASSERT_EQ(a.status, QueryResult::Status::Ok);
    ASSERT_EQ(b.status, QueryResult::Status::Ok);
    EXPECT_TRUE(alpha_equal(s->parse_pattern(a.scheme).scheme, s->parse_pattern(b.scheme).scheme));
  }
}

// (4) the solver against an independent solver run over many equation orders
TEST(PermutationOracle, RandomSets) {
  oracle::RandomSets gen(77);
  const Env& env = oracle::rules_env();
  std::mt19937 shuffle(5);
  int sat = 0, unsat = 0;
  for (int i = 0; i < 400; ++i) {
    ConstraintSet cs = gen.make(12);
    std::vector<int> order;
    for (size_t k = 0; k < cs.constraints.size(); ++k) {
      if (cs.constraints[k].kind == Constraint::Kind::Eq) order.push_back(static_cast<int>(k));
    }
    bool expect = satisfiable(cs, {}, env);
    (expect ? sat : unsat)++;
    std::vector<std::vector<int>> orders{order, {order.rbegin(), order.rend()}};
    for (int r = 0; r < 30; ++r) {
      std::shuffle(order.begin(), order.end(), shuffle);
      orders.push_back(order);
    }
    for (const auto& o : orders) {
      ASSERT_EQ(oracle::reference_satisfiable(cs, env, o), expect) << "set " << i;
    }
  }
  EXPECT_GT(sat, 50);
  EXPECT_GT(unsat, 50);
}

// Small sets: every order of the equations.
TEST(PermutationOracle, ExhaustiveOrdersOnSmallSets) {
  oracle::RandomSets gen(91);
  const Env& env = oracle::rules_env();
  for (int i = 0; i < 150; ++i) {
    ConstraintSet cs = gen.make(7);
    std::vector<int> order;
    for (size_t k = 0; k < cs.constraints.size(); ++k) {
      if (cs.constraints[k].kind == Constraint::Kind::Eq) order.push_back(static_cast<int>(k));
    }
    bool expect = satisfiable(cs, {}, env);
    std::sort(order.begin(), order.end());
    do {
      ASSERT_EQ(oracle::reference_satisfiable(cs, env, order), expect) << "set " << i;
    } while (std::next_permutation(order.begin(), order.end()));
  }
}

// (5) normalize
TEST(Normalize, SchemeAndImplicant) {
  auto s = oracle::open_session("normalize.hs");
  for (Mode m : {Mode::Local, Mode::Global}) {
    s->mode = m;
    QueryResult r = s->type_of("normalize");
    ASSERT_EQ(r.status, QueryResult::Status::Ok) << r.text;
    EXPECT_TRUE(alpha_equal(s->parse_pattern(r.scheme).scheme,
                            s->parse_pattern("(Fractional ([a] -> a), Ord a) => [[a] -> a] -> [[a] -> a]").scheme))
        << r.scheme;
  }
  const Program& p = s->program();
  ConstraintSet cs = oracle::constraints_for(p, Mode::Global, "normalize");
  SchemePattern pat = s->parse_pattern("(Fractional ([_] -> _)) => _");
  Implicant imp = minimal_implicant(cs, p.env(), pat);
  std::vector<char> m = mask(cs.constraints.size(), imp.constraints);
  ASSERT_TRUE(pattern_matches(cs, m, p.env(), pat));
  for (int c : imp.constraints) {
    m[c] = 0;
    EXPECT_FALSE(pattern_matches(cs, m, p.env(), pat)) << "constraint " << c << " is not needed";
    m[c] = 1;
  }
  std::set<LocId> locs = locs_of(cs.constraints, imp.constraints);
  std::set<LocId> slash = oracle::tokens_on_line(p, 2, {"/"});
  std::set<LocId> cons = oracle::tokens_on_line(p, 3, {":"});
  EXPECT_TRUE(std::includes(locs.begin(), locs.end(), slash.begin(), slash.end())) << oracle::describe_locs(p, locs);
  EXPECT_TRUE(std::includes(locs.begin(), locs.end(), cons.begin(), cons.end())) << oracle::describe_locs(p, locs);

  s->mode = Mode::Global;
  QueryResult e = s->explain("normalize", "(Fractional ([_] -> _)) => _");
  ASSERT_EQ(e.status, QueryResult::Status::Ok) << e.text;
  EXPECT_EQ(std::set<LocId>(e.locs.begin(), e.locs.end()), locs);
}

// Generalization against a reference algorithm W.
TEST(AlgorithmW, TopLevelSchemes) {
  std::vector<std::string> files = kWellTyped;
  files.push_back("stack.hs");
  for (const auto& file : files) {
    auto s = oracle::open_session(file);
    oracle::WResult w = oracle::infer_w(s->program());
    ASSERT_FALSE(w.schemes.empty() && w.failed.empty()) << file;
    for (const auto& [name, scheme] : w.schemes) {
      SCOPED_TRACE(file + " " + name);
      QueryResult r = s->type_of(name);
      ASSERT_EQ(r.status, QueryResult::Status::Ok) << r.text;
      EXPECT_TRUE(alpha_equal(s->parse_pattern(r.scheme).scheme, scheme))
          << "debugger " << r.scheme << ", oracle " << pretty_type(scheme);
    }
    for (const auto& name : w.failed) {
      SCOPED_TRACE(file + " " + name);
      EXPECT_EQ(s->type_of(name).status, QueryResult::Status::TypeError);
    }
  }
}
