#include "csm/cli.hpp"

#include "csm/bdr_engine.hpp"
#include "csm/csw.hpp"
#include "csm/exec_store.hpp"
#include "csm/impact.hpp"
#include "csm/inconsistency.hpp"
#include "csm/model_ingest.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <sstream>

namespace csm::cli {

namespace {

struct CommonOptions
{
  std::string model;
  std::string output;
  std::string format = "json";
  std::string matrix;
};

void add_common(CLI::App &cmd, CommonOptions &o)
{
  cmd.add_option("model", o.model, "Model document")->required();
  cmd.add_option("-o,--output", o.output, "Output file (default: standard output)");
  cmd.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  cmd.add_option("--matrix", o.matrix, "Addition matrix override document");
}

class Context
{
public:
  Context(const CommonOptions &o, std::ostream &out) : opts_(o), out_(out) {}

  ModelDocument load_model() const { return parse_model(read_file(opts_.model)); }

  AdditionMatrix matrix() const
  {
    if (opts_.matrix.empty())
      return AdditionMatrix::defaults();
    return AdditionMatrix::from_json(read_file(opts_.matrix));
  }

  void emit(const std::string &content) const
  {
    if (opts_.output.empty())
      out_ << content;
    else
      write_file(opts_.output, content);
  }

  bool text() const { return opts_.format == "text"; }

private:
  const CommonOptions &opts_;
  std::ostream &out_;
};

std::string render_bdrs_text(const std::vector<Bdr> &bdrs)
{
  std::ostringstream os;
  for (const auto &b : bdrs) {
    os << to_string(b.kind) << " " << b.target << " <- " << b.source;
    for (const auto &t : b.ruleTrace)
      os << " " << t;
    os << "\n";
  }
  return os.str();
}

std::string render_graph_text(const DependencyGraph &g)
{
  std::ostringstream os;
  os << "root " << g.root << "\n";
  for (const auto &v : g.vertices)
    os << "vertex " << v << "\n";
  for (const auto &e : g.edges)
    os << "edge " << e.target << " <- " << e.source << " " << to_string(e.kind) << "\n";
  return os.str();
}

std::string join_set(const std::set<std::string> &s)
{
  std::string out;
  for (const auto &x : s)
    out += (out.empty() ? "" : ", ") + x;
  return out;
}

std::string render_csws_text(const std::vector<Csw> &csws)
{
  std::ostringstream os;
  for (const auto &c : csws) {
    os << "workflow " << c.id << " grade " << c.grade << " " << to_string(c.state) << " root " << c.rootArtifact << "\n";
    for (const auto &a : c.activities) {
      os << "  " << a.id << (a.composite ? " composite" : "") << " writes {" << join_set(a.writeSet) << "}";
      if (!a.readSet.empty())
        os << " reads {" << join_set(a.readSet) << "}";
      for (const auto &child : a.childWorkflows)
        os << " branch " << child;
      os << "\n";
    }
    for (const auto &[from, to] : c.arcs)
      os << "  " << from << " -> " << to << "\n";
  }
  return os.str();
}

void maybe_generate(ModelDocument &doc, const Context &ctx, bool generate)
{
  if (generate)
    doc.model.bdrs = merge_bdrs(doc.model.bdrs, generate_bdrs(doc.model, ctx.matrix()));
}

int gen_bdr(const CommonOptions &o, std::ostream &out)
{
  const Context ctx(o, out);
  auto doc = ctx.load_model();
  maybe_generate(doc, ctx, true);
  ctx.emit(ctx.text() ? render_bdrs_text(doc.model.bdrs) : serialize_model(doc));
  return kOk;
}

int impact(const CommonOptions &o, const std::string &root, bool dot, bool generate, std::ostream &out)
{
  const Context ctx(o, out);
  auto doc = ctx.load_model();
  maybe_generate(doc, ctx, generate);
  const auto graph = dependency_graph(doc.model, root);
  if (dot)
    ctx.emit(export_dot(graph));
  else
    ctx.emit(ctx.text() ? render_graph_text(graph) : serialize_graph(graph));
  return kOk;
}

struct CswOptions
{
  std::string root;
  std::string id = "W";
  std::string changeRequest = "CR1";
  std::vector<std::string> against;
  bool expand = false;
  bool generate = false;
};

int gen_csw(const CommonOptions &o, const CswOptions &c, std::ostream &out, std::ostream &err)
{
  const Context ctx(o, out);
  auto doc = ctx.load_model();
  maybe_generate(doc, ctx, c.generate);

  std::vector<Csw> result{generate_csw(doc.model, c.root, c.id, c.changeRequest)};
  if (c.expand) {
    std::vector<Csw> branches;
    for (const auto &a : std::vector<Activity>(result[0].activities)) {
      if (!a.composite)
        continue;
      const auto roots = composite_roots(result[0], a, doc.model);
      for (auto &b : expand_composite(result[0], a.id, doc.model, roots))
        branches.push_back(std::move(b));
    }
    result.insert(result.end(), branches.begin(), branches.end());
  }

  std::vector<Csw> others;
  for (const auto &path : c.against) {
    for (auto &w : parse_csws(read_file(path)))
      others.push_back(std::move(w));
  }
  for (const auto &w : buildtime_check(result[0], others)) {
    err << "warning: " << describe(w) << "\n";
    for (const auto &s : suggest_resolutions(w))
      err << "  - " << s << "\n";
  }

  ctx.emit(ctx.text() ? render_csws_text(result) : serialize_csws(result));
  return kOk;
}

struct SimulateOptions
{
  std::string scenario;
  std::vector<std::string> csws;
  std::string log;
  bool strict = false;
};

int simulate(const CommonOptions &o, const SimulateOptions &s, std::ostream &out)
{
  const Context ctx(o, out);
  const auto doc = ctx.load_model();
  const auto scenario = parse_scenario(read_file(s.scenario));
  std::vector<Csw> csws;
  for (const auto &path : s.csws) {
    for (auto &w : parse_csws(read_file(path)))
      csws.push_back(std::move(w));
  }
  const auto replay = replay_scenario(doc.model, std::move(csws), scenario);
  const auto report = monitor_log(replay.log, doc.model);
  if (!s.log.empty())
    write_file(s.log, serialize_event_log(replay.log));
  ctx.emit(ctx.text() ? render_report_text(report) : serialize_report(report));
  return s.strict && !report.warnings.empty() ? kStrictWarnings : kOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Change support model tool", "csm"};
  app.require_subcommand(1, 1);

  CommonOptions common;

  auto *genBdr = app.add_subcommand("gen-bdr", "Generate BDRs and write the augmented model");
  add_common(*genBdr, common);

  auto *impactCmd = app.add_subcommand("impact", "Dependency graph of a change root");
  add_common(*impactCmd, common);
  std::string impactRoot;
  bool dot = false;
  bool impactGenerate = false;
  impactCmd->add_option("--root", impactRoot, "Change root id")->required();
  impactCmd->add_flag("--dot", dot, "Write Graphviz text");
  impactCmd->add_flag("--generate", impactGenerate, "Generate BDRs before the analysis");

  auto *genCsw = app.add_subcommand("gen-csw", "Generate the change support workflow of a root");
  add_common(*genCsw, common);
  CswOptions cswOpts;
  genCsw->add_option("--root", cswOpts.root, "Change root id")->required();
  genCsw->add_option("--id", cswOpts.id, "Workflow id");
  genCsw->add_option("--change-request", cswOpts.changeRequest, "Change request id");
  genCsw->add_option("--against", cswOpts.against, "Workflow documents to check for shared artifacts");
  genCsw->add_flag("--expand", cswOpts.expand, "Expand composite activities into branch workflows");
  genCsw->add_flag("--generate", cswOpts.generate, "Generate BDRs first");

  auto *sim = app.add_subcommand("simulate", "Replay a scenario and report inconsistencies");
  add_common(*sim, common);
  SimulateOptions simOpts;
  sim->add_option("--scenario", simOpts.scenario, "Scenario document")->required();
  sim->add_option("--csw", simOpts.csws, "Workflow documents");
  sim->add_option("--log", simOpts.log, "Write the event log here");
  sim->add_flag("--strict", simOpts.strict, "Exit 4 when warnings exist");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  try {
    if (genBdr->parsed())
      return gen_bdr(common, out);
    if (impactCmd->parsed())
      return impact(common, impactRoot, dot, impactGenerate, out);
    if (genCsw->parsed())
      return gen_csw(common, cswOpts, out, err);
    return simulate(common, simOpts, out);
  } catch (const IoError &e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const DocumentError &e) {
    for (const auto &d : e.diagnostics())
      err << "error: " << to_string(d) << "\n";
    return kValidation;
  } catch (const ProtocolError &e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kProtocol;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
}

} // namespace csm::cli
