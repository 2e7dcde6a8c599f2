// actdiag: validate, normalize, grade and generate activity diagrams.
//
// Exit status: 0 clean, 1 findings (violations, unsound input, failed runs),
// 2 usage, I/O or parse errors.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "actdiag/batch.hpp"
#include "actdiag/csv_codec.hpp"
#include "actdiag/dataset.hpp"
#include "actdiag/embedding_client.hpp"
#include "actdiag/evaluator.hpp"
#include "actdiag/pipeline.hpp"
#include "actdiag/run_store.hpp"
#include "actdiag/stats.hpp"
#include "actdiag/validator.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace actdiag;

namespace {

constexpr int kClean = 0;
constexpr int kFindings = 1;
constexpr int kUsage = 2;

/// Usage and I/O problems detected after argument parsing.
struct UsageError : Error {
  using Error::Error;
};

struct Options {
  std::string config_path;

  std::string provider = "ngram";
  std::string embedding_url;
  std::string embedding_model;
  std::string embedding_auth_env = "EMBEDDING_API_KEY";

  std::string backend = "scripted";
  std::string script_dir;
  std::string llm_url;
  std::string llm_model;
  std::string llm_auth_env = "OPENAI_API_KEY";
  bool reasoning = false;

  int workers = 1;
};

// Config file values apply unless the matching flag was given.
void apply_config(Options& o, const json& doc, const CLI::App& app) {
  auto set = [&](const char* flag, const json& node, const char* key, auto& field) {
    if (app.count(flag) == 0 && node.contains(key)) field = node[key].get<std::decay_t<decltype(field)>>();
  };
  if (doc.contains("provider")) {
    const auto& p = doc["provider"];
    set("--provider", p, "kind", o.provider);
    set("--embedding-url", p, "url", o.embedding_url);
    set("--embedding-model", p, "model", o.embedding_model);
    set("--embedding-auth-env", p, "auth_env", o.embedding_auth_env);
  }
  if (doc.contains("backend")) {
    const auto& b = doc["backend"];
    set("--backend", b, "kind", o.backend);
    set("--script-dir", b, "script_dir", o.script_dir);
    set("--llm-url", b, "url", o.llm_url);
    set("--llm-model", b, "model", o.llm_model);
    set("--llm-auth-env", b, "auth_env", o.llm_auth_env);
    set("--reasoning", b, "reasoning", o.reasoning);
  }
  set("--workers", doc, "workers", o.workers);
}

std::unique_ptr<SimilarityProvider> make_provider(const Options& o) {
  if (o.provider == "ngram") return std::make_unique<NgramSimilarity>();
  if (o.provider == "exact") return std::make_unique<ExactSimilarity>();
  if (o.provider == "embedding") {
    if (o.embedding_url.empty()) throw UsageError("--provider embedding needs --embedding-url");
    EmbeddingEndpoint ep;
    ep.url = o.embedding_url;
    ep.model = o.embedding_model;
    ep.auth_env = o.embedding_auth_env;
    return std::make_unique<EmbeddingSimilarity>(std::make_shared<HttpEmbeddingTransport>(ep));
  }
  throw UsageError("unknown provider '" + o.provider + "'");
}

ActivityDiagram load_or_usage(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  try {
    return parse_csv(text);
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

int cmd_validate(const std::string& path) {
  auto report = validate(load_or_usage(path));
  std::cout << format_report(report);
  return report.sound() ? kClean : kFindings;
}

int cmd_normalize(const std::string& path) {
  std::cout << serialize_csv(normalize(load_or_usage(path)));
  return kClean;
}

int cmd_render_critique(const std::string& path) {
  auto critique = render_critique(validate(load_or_usage(path)));
  if (critique.empty()) {
    std::cout << "(no issues)\n";
    return kClean;
  }
  std::cout << format_critique(critique);
  return kFindings;
}

std::optional<double> parse_threshold(const std::string& token) {
  if (token == "none") return std::nullopt;
  std::size_t used = 0;
  double t = 0.0;
  try {
    t = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || t < 0.0 || t > 1.0) {
    throw UsageError("threshold must be a number in [0, 1] or 'none', got '" + token + "'");
  }
  return t;
}

std::vector<std::optional<double>> thresholds_from(const std::vector<std::string>& tokens) {
  if (tokens.empty()) return {kSweepThresholds.begin(), kSweepThresholds.end()};
  std::vector<std::optional<double>> out;
  for (const auto& t : tokens) out.push_back(parse_threshold(t));
  return out;
}

int cmd_match(const Options& o, const std::string& gen_path, const std::string& truth_path,
              const std::vector<std::string>& threshold_tokens) {
  auto gen = load_or_usage(gen_path);
  auto truth = load_or_usage(truth_path);
  auto thresholds = thresholds_from(threshold_tokens);
  bool sound = true;
  for (const auto& [label, diagram] : {std::pair{gen_path, &gen}, std::pair{truth_path, &truth}}) {
    auto report = validate(*diagram);
    if (!report.sound()) {
      sound = false;
      std::cout << "# " << label << " is not structurally sound\n" << format_report(report);
    }
  }
  if (!sound) return kFindings;

  auto provider = make_provider(o);
  std::vector<MetricReport> rows;
  if (threshold_tokens.empty()) {
    rows = threshold_sweep_filtered(gen, truth, *provider);
  } else {
    for (auto t : thresholds) rows.push_back(evaluate(gen, truth, *provider, t));
  }
  std::cout << format_sweep_csv(rows);
  return kClean;
}

std::unique_ptr<ChatBackend> make_scripted(const Options& o, const std::string& entry, int rep,
                                           std::string& error) {
  if (o.script_dir.empty()) {
    error = "scripted backend needs --script-dir";
    return nullptr;
  }
  for (auto name : {entry + "." + std::to_string(rep) + ".script", entry + ".script"}) {
    auto path = fs::path(o.script_dir) / name;
    if (fs::is_regular_file(path)) {
      try {
        return std::make_unique<ScriptedBackend>(ScriptedBackend::load(path.string()));
      } catch (const Error& e) {
        error = e.what();
        return nullptr;
      }
    }
  }
  error = "no script for entry '" + entry + "' repetition " + std::to_string(rep) + " in " + o.script_dir;
  return nullptr;
}

int cmd_run(const Options& o, const json& config_doc, const std::string& manifest_path,
            const std::string& variant_name, const std::string& out_dir, int repetitions) {
  if (repetitions < 1) throw UsageError("--repetitions must be at least 1");
  if (o.workers < 1) throw UsageError("--workers must be at least 1");

  RunConfig config;
  try {
    auto base = fs::path(o.config_path).parent_path().string();
    config = RunConfig::from_json(config_doc.dump(), base.empty() ? "." : base);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (!variant_name.empty()) {
    auto v = parse_variant(variant_name);
    if (!v) throw UsageError("unknown variant '" + variant_name + "'");
    config.variant = *v;
  }

  Manifest manifest;
  try {
    manifest = Manifest::load(manifest_path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  auto provider = make_provider(o);

  std::unique_ptr<ChatBackend> shared_backend;
  if (o.backend == "http") {
    if (o.llm_model.empty()) throw UsageError("--backend http needs --llm-model");
    ChatEndpoint ep;
    if (!o.llm_url.empty()) ep.url = o.llm_url;
    ep.model = o.llm_model;
    ep.auth_env = o.llm_auth_env;
    ep.kind = o.reasoning ? ModelKind::Reasoning : ModelKind::InstructionFollowing;
    shared_backend = std::make_unique<HttpChatBackend>(ep);
  } else if (o.backend != "scripted") {
    throw UsageError("unknown backend '" + o.backend + "'");
  }

  std::vector<StoredRun> runs;
  std::vector<std::unique_ptr<ChatBackend>> owned;
  std::vector<RunJob> jobs;
  std::vector<std::size_t> job_run;  // index into runs
  std::map<std::string, ActivityDiagram> truths;
  for (const auto& entry : manifest.entries) {
    truths.emplace(entry.id, load_diagram(entry.ground_truth_path));
    const auto description = read_file(entry.description_path);
    for (int rep = 1; rep <= repetitions; ++rep) {
      StoredRun run;
      run.entry = entry.id;
      run.repetition = rep;
      ChatBackend* backend = shared_backend.get();
      if (!backend) {
        auto scripted = make_scripted(o, entry.id, rep, run.outcome.error);
        backend = scripted.get();
        if (scripted) owned.push_back(std::move(scripted));
      }
      if (backend) {
        jobs.push_back({description, backend});
        job_run.push_back(runs.size());
      }
      runs.push_back(std::move(run));
    }
  }

  auto outcomes = run_batch_parallel(jobs, config, o.workers);
  for (std::size_t i = 0; i < outcomes.size(); ++i) runs[job_run[i]].outcome = std::move(outcomes[i]);

  int status = kClean;
  for (auto& run : runs) {
    grade_run(run, truths.at(run.entry), *provider);
    write_run(out_dir, run);
    const auto& rec = run.outcome.record;
    std::cout << run.entry << "\trep" << run.repetition << "\t"
              << (!run.outcome.ok() ? "failed" : rec && rec->accepted ? "accepted" : "unaccepted") << "\tcalls="
              << (rec ? rec->cost.calls : 0) << "\n";
    if (!run.outcome.ok()) {
      std::cerr << run.entry << " rep" << run.repetition << ": " << run.outcome.error << "\n";
      status = kFindings;
    }
  }
  write_aggregates(out_dir, config.variant, runs);
  return status;
}

std::string variant_of(const fs::path& dir) {
  try {
    auto doc = json::parse(read_file(dir / "run.json"));
    return doc.at("variant").get<std::string>();
  } catch (const std::exception&) {
    return dir.filename().string();
  }
}

int cmd_stats(const std::string& dir_a, const std::string& dir_b, const std::string& metric,
              const std::vector<std::string>& threshold_tokens, const std::string& samples) {
  if (metric != "correctness" && metric != "completeness" && metric != "both") {
    throw UsageError("--metric must be correctness, completeness or both");
  }
  if (samples != "runs" && samples != "entries") throw UsageError("--samples must be runs or entries");
  auto thresholds = thresholds_from(threshold_tokens);
  std::vector<MetricRow> rows_a, rows_b;
  try {
    rows_a = read_metric_rows(dir_a);
    rows_b = read_metric_rows(dir_b);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  std::set<std::string> ids_a, ids_b;
  for (const auto& r : rows_a) ids_a.insert(r.entry);
  for (const auto& r : rows_b) ids_b.insert(r.entry);
  if (ids_a != ids_b) {
    std::string msg = "run directories cover different entries;";
    for (const auto& id : ids_a) {
      if (!ids_b.count(id)) msg += " only in " + dir_a + ": " + id + ";";
    }
    for (const auto& id : ids_b) {
      if (!ids_a.count(id)) msg += " only in " + dir_b + ": " + id + ";";
    }
    throw UsageError(msg);
  }

  const auto name_a = variant_of(dir_a);
  const auto name_b = variant_of(dir_b);
  std::vector<std::string> metrics;
  if (metric != "completeness") metrics.push_back("correctness");
  if (metric != "correctness") metrics.push_back("completeness");

  std::cout << "variant_a,variant_b,metric,threshold,p_value,a12,magnitude,significant\n";
  for (const auto& m : metrics) {
    for (auto t : thresholds) {
      // One value per run, or one mean per entry over its repetitions.
      auto sample = [&](const std::vector<MetricRow>& rows) {
        std::vector<double> xs;
        std::map<std::string, std::pair<double, int>> per_entry;
        for (const auto& r : rows) {
          if (r.threshold != t) continue;
          const double v = m == "correctness" ? r.correctness : r.completeness;
          if (samples == "runs") {
            xs.push_back(v);
          } else {
            per_entry[r.entry].first += v;
            ++per_entry[r.entry].second;
          }
        }
        for (const auto& [id, acc] : per_entry) xs.push_back(acc.first / acc.second);
        return xs;
      };
      auto xs = sample(rows_a);
      auto ys = sample(rows_b);
      if (xs.empty() || ys.empty()) {
        throw UsageError("no rows for threshold " + format_threshold(t));
      }
      auto result = wilcoxon_rank_sum(xs, ys);
      char p[32], a[32];
      std::snprintf(p, sizeof p, "%.6g", result.p_value);
      std::snprintf(a, sizeof a, "%.4f", result.effect.a12);
      std::cout << name_a << "," << name_b << "," << m << "," << format_threshold(t) << "," << p << "," << a
                << "," << to_string(result.effect.magnitude) << "," << (result.significant ? "yes" : "no")
                << "\n";
    }
  }
  return kClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Activity diagram generation, validation and grading"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;

  app.add_option("--config", o.config_path, "JSON configuration file; flags override it");
  app.add_option("--provider", o.provider, "Label similarity: ngram, exact or embedding");
  app.add_option("--embedding-url", o.embedding_url, "Embeddings endpoint URL");
  app.add_option("--embedding-model", o.embedding_model, "Embedding model name");
  app.add_option("--embedding-auth-env", o.embedding_auth_env, "Environment variable holding the embeddings API key");
  app.add_option("--backend", o.backend, "LLM backend: scripted or http");
  app.add_option("--script-dir", o.script_dir, "Directory of <entry>[.<rep>].script files for the scripted backend");
  app.add_option("--llm-url", o.llm_url, "Chat-completions endpoint URL");
  app.add_option("--llm-model", o.llm_model, "Chat model name");
  app.add_option("--llm-auth-env", o.llm_auth_env, "Environment variable holding the chat API key");
  app.add_flag("--reasoning", o.reasoning, "Treat the chat model as a reasoning model (no default temperature)");
  app.add_option("--workers", o.workers, "Concurrent pipeline runs");

  std::string path, gen_path, truth_path, manifest_path, variant, out_dir, dir_a, dir_b, metric = "both", samples = "runs";
  std::vector<std::string> thresholds;
  int repetitions = 1;

  auto* validate_cmd = app.add_subcommand("validate", "Check structural constraints");
  validate_cmd->add_option("diagram", path)->required();

  auto* normalize_cmd = app.add_subcommand("normalize", "Collapse sequential action chains");
  normalize_cmd->add_option("diagram", path)->required();

  auto* critique_cmd = app.add_subcommand("render-critique", "Print the structural critique as given to the refiner");
  critique_cmd->add_option("diagram", path)->required();

  auto* match_cmd = app.add_subcommand("match", "Correctness and completeness of a generated diagram");
  match_cmd->add_option("generated", gen_path)->required();
  match_cmd->add_option("truth", truth_path)->required();
  match_cmd->add_option("--threshold", thresholds, "Threshold in [0, 1] or 'none'; repeatable");

  auto* run_cmd = app.add_subcommand("run", "Run a pipeline variant over a dataset");
  run_cmd->add_option("--manifest", manifest_path)->required();
  run_cmd->add_option("--variant", variant, "Overrides the configured variant");
  run_cmd->add_option("--out", out_dir)->required();
  run_cmd->add_option("--repetitions", repetitions);

  auto* stats_cmd = app.add_subcommand("stats", "Compare two run directories");
  stats_cmd->add_option("run_a", dir_a)->required();
  stats_cmd->add_option("run_b", dir_b)->required();
  stats_cmd->add_option("--metric", metric, "correctness, completeness or both");
  stats_cmd->add_option("--threshold", thresholds, "Threshold in [0, 1] or 'none'; repeatable");
  stats_cmd->add_option("--samples", samples,
                        "runs: one value per (entry, repetition); entries: per-entry mean over repetitions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kClean : kUsage;
  }

  try {
    json config_doc = json::object();
    if (!o.config_path.empty()) {
      try {
        config_doc = json::parse(read_file(o.config_path));
        apply_config(o, config_doc, app);
      } catch (const json::exception& e) {
        throw UsageError(o.config_path + ": " + e.what());
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }

    if (*validate_cmd) return cmd_validate(path);
    if (*normalize_cmd) return cmd_normalize(path);
    if (*critique_cmd) return cmd_render_critique(path);
    if (*match_cmd) return cmd_match(o, gen_path, truth_path, thresholds);
    if (*run_cmd) return cmd_run(o, config_doc, manifest_path, variant, out_dir, repetitions);
    if (*stats_cmd) return cmd_stats(dir_a, dir_b, metric, thresholds, samples);
  } catch (const std::exception& e) {
    std::cerr << "actdiag: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
