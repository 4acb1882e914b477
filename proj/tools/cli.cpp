#include "cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>

#include "netting/documents.hpp"
#include "netting/error.hpp"
#include "netting/service.hpp"
#include "netting/store.hpp"
#include "netting/workbench.hpp"

namespace netting::cli {

namespace {

using documents::Json;

constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

cnl::VocabularyRegistry load_registry(const std::string& path) {
  if (path.empty()) return cnl::VocabularyRegistry::builtin();
  return documents::registry_from_json(documents::read_file(path));
}

service::Server* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Close-out netting workbench"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string registry_path, store_dir = "netting-store";

  auto* parse = app.add_subcommand("parse", "Parse a conclusion sentence");
  std::string sentence;
  parse->add_option("sentence", sentence, "Sentence text")->required();
  parse->add_option("--registry", registry_path, "Vocabulary file")->check(CLI::ExistingFile);

  auto* render = app.add_subcommand("render", "Render a structured sentence document");
  std::string sentence_file;
  render->add_option("file", sentence_file, "Structured sentence file")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--registry", registry_path, "Vocabulary file")->check(CLI::ExistingFile);

  auto* determine = app.add_subcommand("determine", "Compute a netting determination");
  std::vector<std::string> opinion_files;
  std::string facts_file, policy_file, assessment_file, as_of, determined_at;
  bool persist = false, trace_only = false;
  std::optional<int> threshold_bp;
  determine->add_option("--opinion", opinion_files, "Opinion file (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  determine->add_option("--facts", facts_file, "Relationship facts file")
      ->required()
      ->check(CLI::ExistingFile);
  determine->add_option("--policy", policy_file, "Institution policy file")
      ->required()
      ->check(CLI::ExistingFile);
  determine->add_option("--assessment", assessment_file, "Human assessment file")
      ->check(CLI::ExistingFile);
  determine->add_option("--as-of", as_of, "As-of date (YYYY-MM-DD)")->required();
  determine->add_option("--determined-at", determined_at, "Timestamp recorded in the trace");
  determine->add_option("--registry", registry_path, "Vocabulary file")->check(CLI::ExistingFile);
  auto* det_store = determine->add_option("--store", store_dir, "Persist into this store");
  determine->add_flag("--persist", persist, "Persist into --store (default ./netting-store)");
  determine->add_option("--threshold-bp", threshold_bp, "Override the policy threshold")
      ->check(CLI::Range(0, 10000));
  determine->add_flag("--trace", trace_only, "Print only the determination trace");

  auto* exposures = app.add_subcommand("exposures", "Net and gross close-out exposures");
  std::string portfolio_file;
  exposures->add_option("--portfolio", portfolio_file, "Portfolio file")
      ->required()
      ->check(CLI::ExistingFile);

  auto* costmodel = app.add_subcommand("costmodel", "Sector review-cost model");
  std::string params_file, day_rate;
  bool cost_json = false;
  costmodel->add_option("--params", params_file, "Level parameter file")
      ->required()
      ->check(CLI::ExistingFile);
  costmodel->add_option("--day-rate", day_rate, "Money per day for monetization");
  costmodel->add_flag("--json", cost_json, "Emit the cost report document");

  auto* sweep = app.add_subcommand("sweep", "Flip expired Yes determinations to No");
  int default_validity = 365;
  sweep->add_option("--as-of", as_of, "As-of date (YYYY-MM-DD)")->required();
  sweep->add_option("--default-validity", default_validity, "Fallback validity in days");
  sweep->add_option("--store", store_dir, "Store directory");

  auto* event = app.add_subcommand("event", "Record a trigger event");
  std::string kind, subject, payload, occurred_at;
  event->add_option("--kind", kind, "AgreementChanged|LawChanged|TradesChanged|"
                                    "ExtremeEvent|OpinionUpdated|TimeElapsed")
      ->required();
  event->add_option("--subject", subject, "Opinion, relationship or jurisdiction id")->required();
  event->add_option("--payload", payload, "Free-text description");
  event->add_option("--occurred-at", occurred_at, "ISO-8601 UTC timestamp");
  event->add_option("--store", store_dir, "Store directory");

  auto* serve = app.add_subcommand("serve", "Run the local HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port, "Port")->required()->check(CLI::Range(0, 65535));
  serve->add_option("--store", store_dir, "Store directory")->required();
  serve->add_option("--host", host, "Bind address");

  std::string actor = "cli";
  app.add_option("--actor", actor, "Actor recorded in the audit trail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : kUsageError;
  }

  try {
    if (parse->parsed()) {
      out << documents::canonical(workbench::parse_text(sentence, load_registry(registry_path)));
    } else if (render->parsed()) {
      out << workbench::render_document(documents::read_file(sentence_file),
                                        load_registry(registry_path))
          << "\n";
    } else if (determine->parsed()) {
      auto reg = load_registry(registry_path);
      determination::DeterminationInput in;
      for (const auto& f : opinion_files)
        in.opinions.push_back(documents::opinion_from_json(documents::read_file(f), reg));
      in.facts = documents::facts_from_json(documents::read_file(facts_file));
      in.policy = documents::policy_from_json(documents::read_file(policy_file));
      if (!assessment_file.empty())
        in.humanAssessment = documents::assessment_from_json(documents::read_file(assessment_file));
      in.asOfDate = Date::parse(as_of);
      if (!determined_at.empty()) in.determinedAt = Timestamp::parse(determined_at);
      if (threshold_bp)
        in.policy = workbench::apply_overrides(in.policy, Json{{"thresholdBp", *threshold_bp}});
      auto d = determination::determine(in);
      Json doc;
      if (persist || det_store->count() > 0) {
        store::LifecycleStore st(store_dir);
        auto v = st.save_determination(d, actor);
        doc = st.load_determination(d.relationshipId, v);
      } else {
        doc = documents::determination_document(d, reg);
      }
      out << documents::canonical(trace_only ? doc["trace"] : doc);
    } else if (exposures->parsed()) {
      out << documents::canonical(workbench::exposures(documents::read_file(portfolio_file)));
    } else if (costmodel->parsed()) {
      std::optional<Decimal> rate;
      if (!day_rate.empty()) rate = Decimal::parse(day_rate);
      auto report = cost::total_cost(
          documents::cost_params_from_json(documents::read_file(params_file)), rate);
      if (cost_json)
        out << documents::canonical(documents::to_json(report));
      else
        out << cost::format_table(report);
    } else if (sweep->parsed()) {
      store::LifecycleStore st(store_dir);
      workbench::Workbench bench(st);
      out << documents::canonical(
          bench.sweep({{"asOf", as_of}, {"defaultValidityDays", default_validity}}, actor));
    } else if (event->parsed()) {
      store::LifecycleStore st(store_dir);
      workbench::Workbench bench(st);
      Json req{{"kind", kind}, {"subject", subject}, {"payload", payload}};
      if (!occurred_at.empty()) req["occurredAt"] = occurred_at;
      out << documents::canonical(bench.event(req, actor));
    } else if (serve->parsed()) {
      store::LifecycleStore st(store_dir);
      service::Server server(st);
      int bound = server.bind(host, port);
      if (bound < 0) {
        err << "cannot bind " << host << ":" << port << "\n";
        return kDomainError;
      }
      err << "listening on http://" << host << ":" << bound << " (store " << store_dir << ")\n";
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.listen();
      g_server = nullptr;
    }
  } catch (const Error& e) {
    err << documents::canonical(workbench::error_body(e));
    return kDomainError;
  }
  return 0;
}

}  // namespace netting::cli
