#include <doctest.h>

#include <algorithm>

#include "teamtab/error.hpp"
#include "teamtab/oracle.hpp"
#include "teamtab/parser.hpp"
#include "teamtab/tableau.hpp"
#include "corpus.hpp"

using namespace teamtab;

namespace {

LabeledFormula lf(Label label, const char* text) { return {std::move(label), parse(text)}; }

std::vector<RuleInstance> of_rule(const std::vector<RuleInstance>& all, Rule rule) {
  std::vector<RuleInstance> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out), [&](const RuleInstance& r) { return r.rule == rule; });
  return out;
}

}  // namespace

TEST_SUITE("tableau") {

TEST_CASE("root labels") {
  CHECK(root_for(parse("p | ~p")).label == Label{1});
  CHECK(root_for(parse("p || ~p")).label == Label{1, 2});
  CHECK(root_for(parse("=(p,q)")).label == Label{1, 2, 3, 4});
  // 2^vr = 4 but only one proposition: two assignments suffice.
  CHECK(root_for(parse("=(p,p)")).label == Label{1, 2});
  CHECK_THROWS_AS((void)root_for(parse("=(p,q,r,s,t,u,v)")), Error);
}

TEST_CASE("instances") {
  const Branch conj(lf({1, 2}, "p & q"));
  const auto a = enumerate_instances(conj);
  REQUIRE(a.size() == 1);
  CHECK(a[0].rule == Rule::And);
  REQUIRE(a[0].alternatives.size() == 2);
  CHECK(a[0].alternatives[0].formulas == std::vector{lf({1, 2}, "p")});
  CHECK(a[0].alternatives[1].formulas == std::vector{lf({1, 2}, "q")});

  // β = ∅ and β = {1,2} close at once but are still instances.
  const Branch disj(lf({1, 2}, "p | q"));
  CHECK(of_rule(enumerate_instances(disj), Rule::Or).size() == 4);

  const Branch dia(lf({1, 2}, "<>p"));
  CHECK(enumerate_instances(dia).empty());
}

TEST_CASE("applying instances") {
  const Branch prop(lf({1, 2}, "p"));
  const auto inst = enumerate_instances(prop);
  REQUIRE(inst.size() == 1);
  const auto kids = apply_instance(prop, inst[0]);
  REQUIRE(kids.size() == 2);
  CHECK(kids[0].contains(lf({1}, "p")));
  CHECK(kids[1].contains(lf({2}, "p")));

  const Branch idis(lf({1, 2}, "p || ~p"));
  const auto i2 = enumerate_instances(idis);
  REQUIRE(i2.size() == 1);
  const auto one = apply_instance(idis, i2[0]);
  REQUIRE(one.size() == 1);
  CHECK(one[0].contains(lf({1, 2}, "p")));
  CHECK(one[0].contains(lf({1, 2}, "~p")));

  const Branch box(lf({1}, "[]p"));
  const auto i3 = enumerate_instances(box);
  REQUIRE(i3.size() == 1);
  CHECK(i3[0].rule == Rule::Box);
  CHECK(i3[0].params == std::vector<std::uint32_t>{2});
  const auto b = apply_instance(box, i3[0]);
  REQUIRE(b.size() == 1);
  CHECK(b[0].contains(AccessFact{1, 2}));
  CHECK(b[0].contains(lf({2}, "p")));

  // Already applied: nothing left to do.
  CHECK(enumerate_instances(b[0]).empty());
  CHECK_THROWS_AS((void)apply_instance(one[0], i2[0]), Error);
}

TEST_CASE("box alternatives with and without symmetry reduction") {
  Branch b(lf({1, 2}, "[](p || q)"));
  const auto sym = enumerate_instances(b, {}, true);
  const auto all = enumerate_instances(b, {}, false);
  REQUIRE(sym.size() == 1);
  REQUIRE(all.size() == 1);
  CHECK(sym[0].alternatives.size() == 3);
  CHECK(all[0].alternatives.size() == 4);
}

TEST_CASE("closure conditions") {
  Branch clash(lf({1}, "p"));
  clash.add(lf({1}, "~p"));
  REQUIRE(is_closed(clash));
  CHECK(is_closed(clash)->reason == ClosureReason::Clash);

  const Branch empty(lf({}, "q"));
  REQUIRE(is_closed(empty));
  CHECK(is_closed(empty)->reason == ClosureReason::EmptyLabel);

  Branch wide(lf({1, 2}, "p"));
  wide.add(lf({1, 2}, "~p"));
  CHECK_FALSE(is_closed(wide));

  const Branch dep(lf({3}, "=(p,q)"));
  REQUIRE(is_closed(dep));
  CHECK(is_closed(dep)->reason == ClosureReason::SingletonDep);
}

TEST_CASE("rollback restores the branch") {
  Branch b(lf({1, 2}, "p & q"));
  const auto before = b.entries();
  const auto m = b.mark();
  b.add(lf({1}, "p"));
  b.add(lf({1}, "~p"));
  b.add(AccessFact{1, 3});
  CHECK(b.closure());
  b.rollback(m);
  CHECK(b.entries() == before);
  CHECK_FALSE(b.closure());
  CHECK(b.max_index() == 2);
  CHECK_FALSE(b.contains(AccessFact{1, 3}));
}

TEST_CASE("verdicts") {
  const Verdict a = prove(parse("p || ~p"));
  CHECK_FALSE(a.closed);
  REQUIRE(a.prop_countermodel);
  CHECK(a.prop_countermodel->size() == 2);
  CHECK_FALSE(satisfies_prop(*a.prop_countermodel, parse("p || ~p")));

  CHECK(prove(parse("p | ~p")).closed);
  CHECK(prove(parse("=(p,p)")).closed);
  CHECK_FALSE(prove(parse("=(q)")).closed);

  const Verdict d = prove(parse("<>p"));
  CHECK_FALSE(d.closed);
  REQUIRE(d.modal_countermodel);
  CHECK(d.modal_countermodel->model.size() == 1);
  CHECK(d.modal_countermodel->model.edge_count() == 0);
  CHECK(d.modal_countermodel->team.size() == 1);

  CHECK(prove(parse("[](p | ~p)")).closed);
}

TEST_CASE("countermodel extraction") {
  Branch b(lf({1, 2}, "p || ~p"));
  b.add(lf({1, 2}, "p"));
  b.add(lf({1, 2}, "~p"));
  b.add(lf({1}, "p"));
  b.add(lf({2}, "~p"));
  const PropTeam t = extract_prop_countermodel(b);
  CHECK(t.rows() == std::set<std::vector<bool>>{{false}, {true}});

  Branch p(lf({1}, "p"));
  CHECK(extract_prop_countermodel(p).rows() == std::set<std::vector<bool>>{{false}});

  Branch unsat(lf({1, 2}, "p"));
  CHECK_THROWS_AS((void)extract_prop_countermodel(unsat), Error);

  Branch d(lf({1}, "<>p"));
  const ModalCountermodel m = extract_modal_countermodel(d);
  CHECK(m.model.size() == 1);
  CHECK(m.model.edge_count() == 0);
  CHECK(m.model.valuation().at("p").empty());

  Branch bx(lf({1}, "[]p"));
  bx.add(AccessFact{1, 2});
  bx.add(lf({2}, "p"));
  bx.add(lf({1}, "~p"));
  bx.mark_box_applied(lf({1}, "[]p"));
  const ModalCountermodel m2 = extract_modal_countermodel(bx);
  CHECK(m2.model.holds("p", m2.model.index_of("1")));
  CHECK_FALSE(m2.model.holds("p", m2.model.index_of("2")));
}

TEST_CASE("traces replay and reject tampering") {
  for (const char* text : {"p | ~p", "=(p,q) | (p | q)", "p | [](=(q,p) | ~p)", "p || ~p", "<>p | []q"}) {
    CAPTURE(text);
    const Verdict v = prove(parse(text));
    CHECK(check_trace(v) == "");
    REQUIRE_FALSE(v.trace.empty());

    Verdict dropped = v;
    dropped.trace.pop_back();
    if (v.closed) CHECK(check_trace(dropped) != "");

    Verdict swapped = v;
    for (auto& e : swapped.trace) {
      if (auto* s = std::get_if<TraceStep>(&e)) {
        s->instance.principal.label.push_back(99);
        break;
      }
    }
    CHECK(check_trace(swapped) != "");
  }
}

TEST_CASE("reused sibling proofs replay") {
  const Verdict v = prove(parse("[][](=(p | q,~q | ~p) | ~q | p) & (p | ~p)"));
  CHECK(v.closed);
  const bool has_reuse = std::any_of(v.trace.begin(), v.trace.end(),
                                     [](const TraceEvent& e) { return std::holds_alternative<ReuseEvent>(e); });
  CHECK(has_reuse);
  CHECK(check_trace(v) == "");

  std::size_t at = 0;
  while (!std::holds_alternative<ReuseEvent>(v.trace[at])) ++at;
  const ReuseEvent original = std::get<ReuseEvent>(v.trace[at]);
  Verdict t = v;
  auto with_source = [&](std::uint64_t source) {
    std::get<ReuseEvent>(t.trace[at]).source = source;
    return check_trace(t);
  };
  CHECK(with_source(0) != "");
  CHECK(with_source(original.branch) != "");
  CHECK(with_source(1u << 30) != "");
  // branches closed earlier elsewhere in the tree carry different formulas
  std::size_t tried = 0;
  for (std::size_t i = 0; i < at && tried < 4; ++i) {
    const auto* c = std::get_if<ClosureEvent>(&v.trace[i]);
    if (!c || c->branch == original.source) continue;
    ++tried;
    CHECK(with_source(c->branch).find("differs") != std::string::npos);
  }
  CHECK(tried == 4);
  CHECK(with_source(original.source) == "");
}

TEST_CASE("agreement on small propositional formulas") {
  for (const Formula& phi : testing::exhaustive_pd(5)) {
    const Verdict v = prove(phi);
    CHECK(v.closed == valid_prop(phi));
    CHECK(check_trace(v) == "");
  }
}

TEST_CASE("proof json is deterministic") {
  const Formula phi = parse("=(p,q) | ~q & <>p");
  const std::string a = serialize_proof(prove(phi));
  const std::string b = serialize_proof(prove(phi));
  CHECK(a == b);
  const Json j = parse_json(a);
  CHECK(j["version"] == "teamtab-proof/1");
  CHECK(j["verdict"] == "open");
  CHECK(j.contains("countermodel"));
}

TEST_CASE("node limit") {
  ProveOptions o;
  o.node_limit = 3;
  CHECK_THROWS_AS((void)prove(parse("=(p,q) | (p | q)"), o), Error);
}

}  // TEST_SUITE
