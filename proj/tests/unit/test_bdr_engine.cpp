#include "csm/bdr_engine.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

#include <doctest.h>

using namespace csm;

namespace {

ProjectModel two_diagram_model()
{
  ProjectModel m;
  m.phases = {{"P0", "analysis", 0}};
  m.diagrams = {{"CD", "Classes", DiagramKind::ClassDiagram, "P0"},
                {"SQ", "Scenario", DiagramKind::SequenceDiagram, "P0"},
                {"UC", "Use Cases", DiagramKind::UseCaseDiagram, "P0"},
                {"EC", "ElevatorControl", DiagramKind::ClassDiagram, "P0"},
                {"BAD", "Wrong", DiagramKind::ClassDiagram, "P0"}};
  m.elements = {{"elev", "Elevator", ElementKind::UseCase, std::nullopt, "UC", std::nullopt},
                {"user", "User", ElementKind::Actor, std::nullopt, "UC", std::nullopt},
                {"fli", "FloorLampInterface", ElementKind::Class, std::nullopt, "CD", std::nullopt},
                {"logger", "Logger", ElementKind::Class, std::nullopt, "CD", std::nullopt},
                {"obj", ":FloorLampInterfaces", ElementKind::Object, std::string("FloorLampInterfaces"), "SQ", std::nullopt},
                {"stray", ":Thing", ElementKind::Object, std::string("Thing"), "BAD", std::nullopt}};
  return m;
}

} // namespace

TEST_CASE("gme_of")
{
  const auto m = two_diagram_model();
  const ModelIndex index(m);
  CHECK(gme_of(index, index.at("fli")) == Gme::ClassifierElement);
  CHECK(gme_of(index, index.at("obj")) == Gme::InstanceElement);
  CHECK(gme_of(index, index.at("CD")) == Gme::RelationshipDiagram);
  CHECK(gme_of(index, index.at("SQ")) == Gme::InteractionDiagram);
  CHECK_THROWS_AS(gme_of(index, index.at("stray")), UnmappedKindError);

  ProjectModel sc;
  sc.phases = {{"P0", "a", 0}};
  sc.diagrams = {{"S", "s", DiagramKind::StateChartDiagram, "P0"}, {"O", "o", DiagramKind::ObjectDiagram, "P0"}};
  sc.elements = {{"o", "x:Y", ElementKind::Object, std::string("Y"), "O", std::nullopt},
                 {"t", "go", ElementKind::Transition, std::nullopt, "S", std::nullopt}};
  const ModelIndex si(sc);
  CHECK(gme_of(si, si.at("S")) == Gme::BehaviorDiagram);
  CHECK(gme_of(si, si.at("o")) == Gme::ClassifierElement);
  CHECK(gme_of(si, si.at("t")) == Gme::TransitionElement);
}

TEST_CASE("compare")
{
  const auto m = two_diagram_model();
  const ModelIndex index(m);
  CHECK(compare(index, index.at("elev"), index.at("EC")) == std::set{ComparisonCondition::Contained});
  CHECK(compare(index, index.at("fli"), index.at("obj")) == std::set{ComparisonCondition::SimType});
  CHECK(compare(index, index.at("obj"), index.at("fli")) == std::set{ComparisonCondition::TypeSim});
  CHECK(compare(index, index.at("user"), index.at("logger")).empty());
  CHECK(compare(index, index.at("CD"), index.at("fli")) == std::set{ComparisonCondition::Include});
}

TEST_CASE("candidate_bdrs with the default matrix")
{
  const auto ci = candidate_bdrs(Gme::ClassifierElement, Gme::InstanceElement);
  CHECK(ci.count(BdrKind::InformationSharing));
  CHECK(ci.count(BdrKind::Concept));
  CHECK(candidate_bdrs(Gme::RelationshipElement, Gme::ClassifierElement).empty());
  CHECK(candidate_bdrs(Gme::RelationshipDiagram, Gme::ClassifierElement).count(BdrKind::ExistTogether));
  CHECK(candidate_bdrs(Gme::MessageElement, Gme::MessageElement).empty());
  // No comparison row pairs a relationship element with anything.
  for (const auto &[t, s] : admitted_gme_pairs()) {
    CHECK(t != Gme::RelationshipElement);
    CHECK(s != Gme::RelationshipElement);
  }
}

TEST_CASE("selection truth table")
{
  enum class Ph { Same, Adjoining, Separate };
  struct Row
  {
    Ph phase;
    bool sameDiagram;
    bool sameKind;
    bool similar;
    std::optional<BdrKind> expected;
  };
  const std::vector<Row> rows{
    {Ph::Same, true, true, true, BdrKind::ExistTogether},
    {Ph::Same, true, true, false, BdrKind::ExistTogether},
    {Ph::Same, true, false, true, BdrKind::ExistTogether},
    {Ph::Same, true, false, false, BdrKind::ExistTogether},
    {Ph::Same, false, true, true, BdrKind::Copy},
    {Ph::Same, false, true, false, std::nullopt},
    {Ph::Same, false, false, true, BdrKind::InformationSharing},
    {Ph::Same, false, false, false, BdrKind::InformationSharing},
    {Ph::Adjoining, false, true, true, BdrKind::Concept},
    {Ph::Adjoining, false, true, false, BdrKind::Concept},
    {Ph::Adjoining, false, false, true, BdrKind::Concept},
    {Ph::Adjoining, false, false, false, BdrKind::Concept},
    {Ph::Separate, false, true, true, std::nullopt},
    {Ph::Separate, false, true, false, std::nullopt},
    {Ph::Separate, false, false, true, std::nullopt},
    {Ph::Separate, false, false, false, std::nullopt},
  };
  REQUIRE(rows.size() == 16);  // 24 combinations less 8 with one diagram in two phases

  const std::set<BdrKind> all{BdrKind::ExistTogether, BdrKind::InformationSharing, BdrKind::Copy, BdrKind::Concept};
  for (const auto &r : rows) {
    ProjectModel m;
    m.phases = {{"P0", "a", 0}, {"P1", "b", 1}, {"P2", "c", 2}};
    const std::string sourcePhase = r.phase == Ph::Same ? "P0" : r.phase == Ph::Adjoining ? "P1" : "P2";
    m.diagrams = {{"T", "t", DiagramKind::CollaborationDiagram, "P0"}, {"S", "s", DiagramKind::CollaborationDiagram, sourcePhase}};
    const std::string sourceDiagram = r.sameDiagram ? "T" : "S";
    m.elements.push_back({"t", "door:Door", ElementKind::Object, std::string("Door"), "T", std::nullopt});
    if (r.sameKind)
      m.elements.push_back({"s", r.similar ? "door:Door" : "window:Window", ElementKind::Object,
                            std::string(r.similar ? "Door" : "Window"), sourceDiagram, std::nullopt});
    else
      m.elements.push_back({"s", r.similar ? "Door" : "Window", ElementKind::Class, std::nullopt, sourceDiagram, std::nullopt});
    const ModelIndex index(m);
    CAPTURE(static_cast<int>(r.phase));
    CAPTURE(r.sameDiagram);
    CAPTURE(r.sameKind);
    CAPTURE(r.similar);
    CHECK(select_bdr(index, CandidatePair{"t", "s", {}}, all) == r.expected);
    // The result is always filtered by the candidates.
    CHECK_FALSE(select_bdr(index, CandidatePair{"t", "s", {}}, {}));
  }
}

TEST_CASE("Concept needs the source in the later phase")
{
  ProjectModel m;
  m.phases = {{"P0", "a", 0}, {"P1", "b", 1}};
  m.diagrams = {{"T", "t", DiagramKind::ClassDiagram, "P1"}, {"S", "s", DiagramKind::ClassDiagram, "P0"}};
  m.elements = {{"t", "Door", ElementKind::Class, std::nullopt, "T", std::nullopt},
                {"s", "Door", ElementKind::Class, std::nullopt, "S", std::nullopt}};
  const ModelIndex index(m);
  const std::set<BdrKind> all{BdrKind::Concept};
  CHECK_FALSE(select_bdr(index, {"t", "s", {}}, all));
  CHECK(select_bdr(index, {"s", "t", {}}, all) == BdrKind::Concept);
}

TEST_CASE("selection examples")
{
  const auto m = test::load_model_fixture("class-object.model.json");
  const ModelIndex index(m);
  const std::set<BdrKind> ci = candidate_bdrs(Gme::ClassifierElement, Gme::InstanceElement);
  CHECK(select_bdr(index, {"C1", "O1", {ComparisonCondition::SimType}}, ci) == BdrKind::InformationSharing);
}

TEST_CASE("generate_bdrs on the class and object fixture")
{
  const auto m = test::load_model_fixture("class-object.model.json");
  const auto bdrs = generate_bdrs(m);
  std::vector<Bdr> between;
  for (const auto &b : bdrs)
    if ((b.target == "C1" && b.source == "O1") || (b.target == "O1" && b.source == "C1"))
      between.push_back(b);
  REQUIRE(between.size() == 1);
  CHECK(between[0].kind == BdrKind::InformationSharing);
  CHECK(between[0].target == "C1");
  CHECK(between[0].source == "O1");
  CHECK(between[0].ruleTrace == std::vector<std::string>{"row:Class<-Object", "cond:SimType",
                                                         "gme:ClassifierElement<-InstanceElement",
                                                         "cell:same-phase/different-diagram/different-kind"});
}

TEST_CASE("generate_bdrs small cases")
{
  CHECK(generate_bdrs(test::load_model_fixture("minimal.model.json")).size() == 1);  // diagram contains its class
  ProjectModel single;
  single.phases = {{"P0", "a", 0}};
  single.diagrams = {{"D", "d", DiagramKind::ClassDiagram, "P0"}};
  CHECK(generate_bdrs(single).empty());
  CHECK(generate_bdrs(ProjectModel{}).empty());
}

TEST_CASE("generate_bdrs on the elevator fixture")
{
  const auto m = test::load_model_fixture("elevator.model.json");
  const auto bdrs = generate_bdrs(m);
  auto find = [&](const std::string &t, const std::string &s) -> const Bdr * {
    for (const auto &b : bdrs)
      if (b.target == t && b.source == s)
        return &b;
    return nullptr;
  };
  const auto *conceptBdr = find("1.1", "D3");
  REQUIRE(conceptBdr);
  CHECK(conceptBdr->kind == BdrKind::Concept);
  CHECK(conceptBdr->ruleTrace.back() == "cell:adjoining-phase");
  CHECK_FALSE(find("1.1", "D8"));  // two phases apart
  REQUIRE(find("D3", "1.2.2.1"));
  CHECK(find("D3", "1.2.2.1")->kind == BdrKind::ExistTogether);
  REQUIRE(find("2.1", "7.1"));
  CHECK(find("2.1", "7.1")->kind == BdrKind::Concept);
  REQUIRE(find("2.4", "4.2"));
  CHECK(find("2.4", "4.2")->kind == BdrKind::InformationSharing);

  const ModelIndex index(m);
  for (const auto &b : bdrs) {
    CAPTURE(b.target);
    CAPTURE(b.source);
    CHECK_FALSE(bdr_invariant_violation(index, b));
    CHECK(replay_trace(index, b) == b);
  }
}

TEST_CASE("generation properties on random models")
{
  std::mt19937 rng(2024);
  for (int i = 0; i < 150; ++i) {
    const auto m = test::random_valid_model(rng);
    const auto bdrs = generate_bdrs(m);
    CHECK(generate_bdrs(m) == bdrs);
    CHECK(std::is_sorted(bdrs.begin(), bdrs.end(), [](const Bdr &a, const Bdr &b) {
      return std::tie(a.target, a.source, a.kind) < std::tie(b.target, b.source, b.kind);
    }));
    const ModelIndex index(m);
    std::set<std::tuple<std::string, std::string, BdrKind>> seen;
    for (const auto &b : bdrs) {
      CHECK(seen.emplace(b.target, b.source, b.kind).second);
      CHECK_FALSE(bdr_invariant_violation(index, b));
      CHECK(replay_trace(index, b) == b);
      if (b.kind != BdrKind::Concept)
        CHECK_FALSE(seen.count({b.source, b.target, b.kind}));
    }
  }
}

TEST_CASE("replay_trace rejects tampered traces")
{
  const auto m = test::load_model_fixture("class-object.model.json");
  const ModelIndex index(m);
  auto b = generate_bdrs(m);
  auto it = std::find_if(b.begin(), b.end(), [](const Bdr &x) { return x.target == "C1"; });
  REQUIRE(it != b.end());
  Bdr tampered = *it;
  tampered.ruleTrace[1] = "cond:Similar";
  CHECK_FALSE(replay_trace(index, tampered));
  tampered = *it;
  tampered.kind = BdrKind::Copy;
  CHECK_FALSE(replay_trace(index, tampered));
}

TEST_CASE("addition matrix override")
{
  const auto m = test::load_model_fixture("class-object.model.json");
  const auto matrix = AdditionMatrix::from_json(R"({"schemaVersion":"1","entries":[
    {"target":"ClassifierElement","source":"InstanceElement","kinds":["Concept"]}]})");
  CHECK(matrix.candidates(Gme::ClassifierElement, Gme::InstanceElement) == std::set{BdrKind::Concept});
  for (const auto &b : generate_bdrs(m, matrix))
    CHECK_FALSE((b.target == "C1" && b.source == "O1"));
  CHECK(AdditionMatrix::from_json(R"({"schemaVersion":"1","entries":[]})") == AdditionMatrix::defaults());
  CHECK_THROWS_AS(AdditionMatrix::from_json(R"({"schemaVersion":"1","entries":[{"target":"ClassifierElement","source":"Nope","kinds":[]}]})"),
                  DocumentError);
  CHECK_THROWS_AS(AdditionMatrix::from_json(R"({"schemaVersion":"1","entries":[{"target":"ClassifierElement","source":"InstanceElement","kinds":["Nope"]}]})"),
                  DocumentError);
}

TEST_CASE("merge_bdrs keeps existing entries first")
{
  const Bdr a{"x", "y", BdrKind::Copy, {"manual"}};
  const Bdr b{"x", "y", BdrKind::Copy, {"row:Class<-Class"}};
  const Bdr c{"p", "q", BdrKind::Concept, {}};
  const auto merged = merge_bdrs({a}, {b, c});
  REQUIRE(merged.size() == 2);
  CHECK(merged[0].ruleTrace == std::vector<std::string>{"manual", "row:Class<-Class"});
  CHECK(merged[1] == c);
}
