#include "csm/inconsistency.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace csm;

namespace {

struct Decl
{
  std::string workflow;
  std::string activity;
  std::vector<std::string> writes;
  std::vector<std::string> reads;
};

struct Step
{
  double time;
  std::string workflow;
  std::string activity;
  std::string artifact;
  Action action;
};

ProjectModel deps_model() { return test::load_model_fixture("scenario.model.json"); }

EventLog run(const std::vector<Decl> &decls, const std::vector<Step> &steps)
{
  ScenarioDocument s;
  for (const auto &d : decls) {
    auto it = std::find_if(s.workflows.begin(), s.workflows.end(), [&](const auto &w) { return w.id == d.workflow; });
    if (it == s.workflows.end()) {
      s.workflows.push_back(WorkflowDeclaration{d.workflow, {}});
      it = s.workflows.end() - 1;
    }
    it->activities.push_back(ActivityDeclaration{d.activity, d.writes, d.reads, std::nullopt});
  }
  for (const auto &e : steps)
    s.events.push_back(ScenarioEvent{e.time, e.workflow, e.activity, e.artifact, e.action});
  return replay_scenario(deps_model(), {}, s).log;
}

constexpr Action CO = Action::CheckOut;
constexpr Action CI = Action::CheckIn;

EventLog two_writers()
{
  return replay_scenario(deps_model(), {}, parse_scenario(test::read_fixture("two-writers.scenario.json"))).log;
}

const std::vector<std::size_t> &evidence(const InconsistencyWarning &w, const std::string &clause)
{
  for (const auto &e : w.evidence)
    if (e.clause == clause)
      return e.events;
  FAIL("no clause " << clause);
  static const std::vector<std::size_t> none;
  return none;
}

} // namespace

TEST_CASE("access ledger")
{
  const auto log = two_writers();
  const AccessLedger ledger(log);
  const auto *a = ledger.find({"W1", "A"}, "d");
  REQUIRE(a);
  CHECK(a->checkoutTime == 1.0);
  CHECK(a->checkinTime == 3.0);
  CHECK(a->checkoutVersion == 1);
  CHECK(a->checkinVersion == 2);
  CHECK(ledger.records().size() == 2);
  CHECK(ledger.activities() == std::vector<ActivityRef>{{"W1", "A"}, {"W2", "B"}});
  CHECK(ledger.start_of({"W2", "B"}) == 2.0);
  CHECK_FALSE(ledger.start_of({"W9", "Z"}));

  AccessLedger partial;
  partial.add(log[0]);
  CHECK(std::isinf(partial.find({"W1", "A"}, "d")->end()));
  CHECK_THROWS_AS(partial.add(log[0]), ProtocolError);
  CHECK_THROWS_AS(partial.add(log[3]), ProtocolError);  // B never checked out
}

TEST_CASE("write-write direct conflict")
{
  const auto log = two_writers();
  const auto ws = detect_all(log, deps_model());
  REQUIRE(ws.size() == 1);
  const auto &w = ws[0];
  CHECK(w.kind == PatternKind::WwDirectConflict);
  CHECK(w.confirmed);
  CHECK(w.activities == std::vector<ActivityRef>{{"W1", "A"}, {"W2", "B"}});
  CHECK(w.artifacts == std::vector<std::string>{"d"});
  CHECK(w.detectionTime == 2.0);
  CHECK(w.confirmedAt == 4.0);
  CHECK(evidence(w, "writes") == std::vector<std::size_t>{0, 1});
  CHECK(evidence(w, "different-checkin-versions") == std::vector<std::size_t>{2, 3});
  CHECK(evidence(w, "overlap") == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(detect_ww_direct(AccessLedger(log)) == ws);

  const auto sequential =
    replay_scenario(deps_model(), {}, parse_scenario(test::read_fixture("conflict-free.scenario.json"))).log;
  CHECK(detect_all(sequential, deps_model()).empty());
}

TEST_CASE("potential indirect conflict")
{
  const auto log = run({{"W1", "A", {"d2"}, {}}, {"W2", "B", {"d6"}, {}}},
                       {{1, "W1", "A", "d2", CO}, {2, "W2", "B", "d6", CO}, {3, "W1", "A", "d2", CI}, {4, "W2", "B", "d6", CI}});
  const auto ws = detect_all(log, deps_model());
  REQUIRE(ws.size() == 1);
  CHECK(ws[0].kind == PatternKind::PotentialIndirectConflict);
  CHECK(ws[0].activities == std::vector<ActivityRef>{{"W1", "A"}, {"W2", "B"}});
  CHECK(ws[0].artifacts == std::vector<std::string>{"d2", "d6"});
  CHECK(ws[0].detectionTime == 2.0);
  CHECK(ws[0].confirmedAt == 2.0);

  // No dependency, no warning.
  const auto unrelated = run({{"W1", "A", {"d"}, {}}, {"W2", "B", {"d6"}, {}}},
                             {{1, "W1", "A", "d", CO}, {2, "W2", "B", "d6", CO}, {3, "W1", "A", "d", CI}, {4, "W2", "B", "d6", CI}});
  CHECK(detect_all(unrelated, deps_model()).empty());
}

TEST_CASE("read-write direct conflict")
{
  const auto log = run({{"W1", "A", {"d"}, {}}, {"W2", "B", {"d1"}, {"d"}}},
                       {{1, "W1", "A", "d", CO},
                        {2, "W2", "B", "d", CO},
                        {3, "W2", "B", "d1", CO},
                        {4, "W1", "A", "d", CI},
                        {5, "W2", "B", "d1", CI}});
  const auto ws = detect_all(log, deps_model());
  REQUIRE(ws.size() == 1);
  CHECK(ws[0].kind == PatternKind::RwDirectConflict);
  CHECK(ws[0].activities == std::vector<ActivityRef>{{"W1", "A"}, {"W2", "B"}});
  CHECK(ws[0].artifacts == std::vector<std::string>{"d", "d1"});
  CHECK(ws[0].detectionTime == 3.0);
  CHECK(ws[0].confirmedAt == 4.0);
  CHECK(evidence(ws[0], "changed-input") == std::vector<std::size_t>{1, 3});

  const auto possible = possibility_warnings(AccessLedger(EventLog(log.begin(), log.begin() + 3)), log[2]);
  REQUIRE(possible.size() == 1);
  CHECK(possible[0].kind == PatternKind::RwDirectConflict);
  CHECK_FALSE(possible[0].confirmed);
  CHECK_FALSE(possible[0].confirmedAt);
  CHECK(possible[0].detectionTime == 3.0);

  // B reads after A's check-in: it saw the new version.
  const auto late = run({{"W1", "A", {"d"}, {}}, {"W2", "B", {"d1"}, {"d"}}},
                        {{1, "W1", "A", "d", CO}, {2, "W1", "A", "d", CI}, {3, "W2", "B", "d", CO}, {4, "W2", "B", "d1", CO}, {5, "W2", "B", "d1", CI}});
  CHECK(detect_all(late, deps_model()).empty());
}

TEST_CASE("write-write-write potential indirect")
{
  const auto log = run({{"W1", "A", {"d6"}, {}}, {"W1", "B", {"d7"}, {}}, {"W2", "P", {"d2"}, {}}},
                       {{1, "W1", "A", "d6", CO},
                        {2, "W1", "A", "d6", CI},
                        {3, "W2", "P", "d2", CO},
                        {4, "W2", "P", "d2", CI},
                        {5, "W1", "B", "d7", CO},
                        {6, "W1", "B", "d7", CI}});
  const auto ws = detect_all(log, deps_model());
  REQUIRE(ws.size() == 1);
  CHECK(ws[0].kind == PatternKind::WwwPotentialIndirect);
  CHECK(ws[0].activities == std::vector<ActivityRef>{{"W1", "A"}, {"W1", "B"}, {"W2", "P"}});
  CHECK(ws[0].artifacts == std::vector<std::string>{"d6", "d7", "d2"});
  CHECK(ws[0].detectionTime == 5.0);
  CHECK(evidence(ws[0], "nested") == std::vector<std::size_t>{1, 2, 3, 4});
  CHECK(detect_www(AccessLedger(log), Reachability(deps_model())) == ws);
}

TEST_CASE("read-write-read direct inconsistency")
{
  const auto log = run({{"W1", "A", {"d1"}, {"d"}}, {"W1", "B", {"d2"}, {"d"}}, {"W2", "P", {"d"}, {}}},
                       {{1, "W1", "A", "d", CO},
                        {2, "W1", "A", "d1", CO},
                        {3, "W1", "A", "d1", CI},
                        {4, "W2", "P", "d", CO},
                        {5, "W2", "P", "d", CI},
                        {6, "W1", "B", "d", CO},
                        {7, "W1", "B", "d2", CO},
                        {8, "W1", "B", "d2", CI}});
  const auto ws = detect_all(log, deps_model());
  REQUIRE(ws.size() == 1);
  CHECK(ws[0].kind == PatternKind::RwrDirectInconsistency);
  CHECK(ws[0].activities == std::vector<ActivityRef>{{"W1", "A"}, {"W1", "B"}, {"W2", "P"}});
  CHECK(ws[0].artifacts == std::vector<std::string>{"d", "d1", "d2"});
  CHECK(ws[0].detectionTime == 7.0);
  CHECK(ws[0].confirmedAt == 7.0);
}

TEST_CASE("write-two-write potential indirect")
{
  const auto log = run({{"W1", "A", {"d2"}, {}}, {"W1", "B", {"d7"}, {}}, {"W2", "P", {"d2"}, {}}},
                       {{1, "W1", "A", "d2", CO},
                        {2, "W1", "A", "d2", CI},
                        {3, "W2", "P", "d2", CO},
                        {4, "W2", "P", "d2", CI},
                        {5, "W1", "B", "d7", CO},
                        {6, "W1", "B", "d7", CI}});
  const auto ws = detect_all(log, deps_model());
  REQUIRE(ws.size() == 1);
  CHECK(ws[0].kind == PatternKind::W2wPotentialIndirect);
  CHECK(ws[0].activities == std::vector<ActivityRef>{{"W1", "A"}, {"W1", "B"}, {"W2", "P"}});
  CHECK(ws[0].artifacts == std::vector<std::string>{"d2", "d7"});
  CHECK(ws[0].detectionTime == 5.0);
  CHECK(detect_w2w(AccessLedger(log), Reachability(deps_model())) == ws);
}

TEST_CASE("write-write-read direct inconsistency")
{
  const auto log = run({{"W1", "A", {"d"}, {}}, {"W1", "B", {"d1"}, {"d"}}, {"W2", "P", {"d"}, {}}},
                       {{1, "W1", "A", "d", CO},
                        {2, "W1", "A", "d", CI},
                        {3, "W2", "P", "d", CO},
                        {4, "W2", "P", "d", CI},
                        {5, "W1", "B", "d", CO},
                        {6, "W1", "B", "d1", CO},
                        {7, "W1", "B", "d1", CI}});
  const auto ws = detect_all(log, deps_model());
  REQUIRE(ws.size() == 1);
  CHECK(ws[0].kind == PatternKind::WwrDirectInconsistency);
  CHECK(ws[0].activities == std::vector<ActivityRef>{{"W1", "A"}, {"W1", "B"}, {"W2", "P"}});
  CHECK(ws[0].artifacts == std::vector<std::string>{"d", "d1"});
  CHECK(ws[0].detectionTime == 6.0);
  CHECK(evidence(ws[0], "version-chain") == std::vector<std::size_t>{1, 2, 3, 4});
}

TEST_CASE("nesting is strict")
{
  // B's write checkout precedes P, so P is not nested even though B reads d later.
  const auto log = run({{"W1", "A", {"d"}, {}}, {"W1", "B", {"d1"}, {"d"}}, {"W2", "P", {"d"}, {}}},
                       {{1, "W1", "A", "d", CO},
                        {2, "W1", "A", "d", CI},
                        {3, "W1", "B", "d1", CO},
                        {4, "W2", "P", "d", CO},
                        {5, "W2", "P", "d", CI},
                        {6, "W1", "B", "d", CO},
                        {7, "W1", "B", "d1", CI}});
  for (const auto &w : detect_all(log, deps_model()))
    CHECK(w.kind != PatternKind::WwrDirectInconsistency);
  CHECK(test::filter_kinds(test::brute_force_detect(log, deps_model()), {PatternKind::WwrDirectInconsistency}).empty());
}

TEST_CASE("monitor on the two-writer scenario")
{
  const auto log = two_writers();
  InconsistencyMonitor m(deps_model());
  CHECK(m.step(log[0]).empty());
  const auto at2 = m.step(log[1]);
  REQUIRE(at2.size() == 1);
  CHECK(at2[0].kind == PatternKind::WwDirectConflict);
  CHECK_FALSE(at2[0].confirmed);
  CHECK(at2[0].detectionTime == 2.0);
  CHECK(evidence(at2[0], "writes") == std::vector<std::size_t>{0, 1});
  CHECK(m.step(log[2]).empty());
  const auto at4 = m.step(log[3]);
  REQUIRE(at4.size() == 1);
  CHECK(at4[0].confirmed);
  CHECK(at4[0].confirmedAt == 4.0);
  CHECK(m.confirmed() == detect_all(log, deps_model()));
  CHECK_THROWS_AS(m.step(log[3]), ProtocolError);
}

TEST_CASE("monitor agrees with offline detection and the oracle")
{
  std::mt19937 rng(31);
  for (int i = 0; i < 300; ++i) {
    const auto rs = test::random_scenario(rng);
    const auto log = replay_scenario(rs.model, {}, rs.scenario).log;
    const auto offline = detect_all(log, rs.model);
    CHECK(test::hits_of(offline) == test::brute_force_detect(log, rs.model));
    const auto report = monitor_log(log, rs.model);
    CHECK(report.warnings == offline);
    for (const auto &t : report.timeline) {
      if (t.warning.confirmed)
        CHECK(t.time == *t.warning.confirmedAt);
      else
        CHECK(t.time == t.warning.detectionTime);
    }
    for (const auto &w : offline) {
      CHECK(w.detectionTime <= *w.confirmedAt);
      for (const auto &e : w.evidence)
        for (auto id : e.events)
          CHECK(log[id].time <= *w.confirmedAt);
    }
  }
}

TEST_CASE("canonical order")
{
  InconsistencyWarning a;
  a.detectionTime = 2;
  InconsistencyWarning b = a;
  b.confirmed = false;
  b.confirmedAt.reset();
  InconsistencyWarning c = a;
  c.detectionTime = 1;
  std::vector<InconsistencyWarning> v{b, a, c};
  sort_canonical(v);
  CHECK(v[0].detectionTime == 1.0);
  CHECK(v[1].confirmed);
  CHECK_FALSE(v[2].confirmed);
}

TEST_CASE("resolution suggestions")
{
  const auto ws = detect_all(two_writers(), deps_model());
  const auto s = suggest_resolutions(ws.at(0));
  REQUIRE(s.size() == 3);
  CHECK(s[0].starts_with("Fine-grain partition"));
  CHECK(s[0].find("{d}") != std::string::npos);
  CHECK(s[1].starts_with("Combined change request"));
  CHECK(s[1].find("{W1, W2}") != std::string::npos);
  CHECK(s[2].starts_with("Merge"));

  const BuildTimeWarning exec{BuildTimeKind::PlanningVsExecuting, "N", "X", {"e"}};
  const auto e = suggest_resolutions(exec);
  REQUIRE(e.size() == 4);
  CHECK(e[0].starts_with("Delay"));
  CHECK(suggest_resolutions(BuildTimeWarning{BuildTimeKind::PlanningVsPlanning, "N", "P", {"d"}}).size() == 3);
}

TEST_CASE("report document")
{
  const auto report = monitor_log(two_writers(), deps_model());
  REQUIRE(report.timeline.size() == 2);
  const auto text = serialize_report(report);
  CHECK(parse_report(text) == report);
  CHECK(serialize_report(parse_report(text)) == text);
  const auto rendered = render_report_text(report);
  CHECK(rendered.find("warnings: 1") != std::string::npos);
  CHECK(rendered.find("WwDirectConflict (possible)") != std::string::npos);
  CHECK(describe(report.warnings[0]) ==
        "WwDirectConflict activities [W1/A, W2/B] artifacts [d] detected at 2, confirmed at 4");

  CHECK_THROWS_AS(parse_report(R"({"schemaVersion":"1","warnings":[{"kind":"WwDirectConflict","confirmed":true,
    "activities":[],"artifacts":[],"detectionTime":1,"confirmedAt":null,"evidence":[]}],"timeline":[]})"),
                  DocumentError);

  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto rs = test::random_scenario(rng);
    const auto r = monitor_log(replay_scenario(rs.model, {}, rs.scenario).log, rs.model);
    CHECK(parse_report(serialize_report(r)) == r);
  }
}
