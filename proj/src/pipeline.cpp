#include "actdiag/pipeline.hpp"

#include <filesystem>

#include <nlohmann/json.hpp>

#include "actdiag/csv_codec.hpp"
#include "actdiag/validator.hpp"

namespace actdiag {

std::string_view to_string(CallKind kind) {
  switch (kind) {
    case CallKind::Generate: return "generate";
    case CallKind::StructuralCritique: return "structural_critique";
    case CallKind::AlignmentCritique: return "alignment_critique";
    case CallKind::CombinedCritique: return "combined_critique";
    case CallKind::Refine: return "refine";
  }
  return "generate";
}

void CostLedger::record(CallKind kind, const Usage& usage) {
  ++calls;
  ++calls_by_kind[kind];
  input_tokens += usage.input_tokens;
  output_tokens += usage.output_tokens;
  reasoning_tokens += usage.reasoning_tokens;
}

void CostLedger::record(CallKind kind, const ChatResponse& response) {
  record(kind, response.usage);
  if (response.usage_malformed) ++usage_gaps;
}

std::uint64_t CostLedger::calls_of(CallKind kind) const {
  auto it = calls_by_kind.find(kind);
  return it == calls_by_kind.end() ? 0 : it->second;
}

CostLedger& CostLedger::operator+=(const CostLedger& other) {
  calls += other.calls;
  input_tokens += other.input_tokens;
  output_tokens += other.output_tokens;
  reasoning_tokens += other.reasoning_tokens;
  usage_gaps += other.usage_gaps;
  for (const auto& [k, v] : other.calls_by_kind) calls_by_kind[k] += v;
  return *this;
}

RunConfig RunConfig::from_json(std::string_view text, const std::string& base_dir) {
  using json = nlohmann::json;
  RunConfig cfg;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid run configuration: ") + e.what());
  }
  try {
    if (doc.contains("variant")) {
      auto name = doc["variant"].get<std::string>();
      auto v = parse_variant(name);
      if (!v) throw Error("unknown variant '" + name + "'");
      cfg.variant = *v;
    }
    if (doc.contains("iteration_cap")) cfg.iteration_cap = doc["iteration_cap"].get<int>();
    if (doc.contains("restart_limit")) cfg.restart_limit = doc["restart_limit"].get<int>();
    if (doc.contains("prompt_dir")) {
      std::filesystem::path dir = doc["prompt_dir"].get<std::string>();
      if (dir.is_relative()) dir = std::filesystem::path(base_dir) / dir;
      cfg.prompts = PromptFixtures::load(dir.string());
    }
    if (doc.contains("temperature")) cfg.decoding.temperature = doc["temperature"].get<double>();
    if (doc.contains("max_output")) cfg.decoding.max_output = doc["max_output"].get<int>();
  } catch (const json::exception& e) {
    throw Error(std::string("invalid run configuration: ") + e.what());
  }
  if (cfg.iteration_cap < 1) throw Error("iteration_cap must be at least 1");
  if (cfg.restart_limit < 0) throw Error("restart_limit must not be negative");
  return cfg;
}

Candidate Candidate::from_reply(std::string_view reply) {
  Candidate c;
  c.csv = extract_csv_block(reply);
  try {
    c.diagram = parse_csv(c.csv);
  } catch (const Error& e) {
    c.parse_error = e.what();
  }
  return c;
}

std::vector<std::string> RunRecord::candidate_history() const {
  std::vector<std::string> out;
  for (const auto& a : attempts) {
    for (std::size_t i = 0; i < a.critiques.size(); ++i) {
      if (!a.critiques[i].empty()) out.push_back(a.candidates[i]);
    }
  }
  return out;
}

std::vector<Critique> RunRecord::critiques() const {
  std::vector<Critique> out;
  for (const auto& a : attempts) out.insert(out.end(), a.critiques.begin(), a.critiques.end());
  return out;
}

namespace {

Critique llm_critique(Variant variant, CallKind kind, const PromptContext& ctx, ChatBackend& backend,
                      const RunConfig& config, CostLedger& ledger) {
  auto resp = backend.complete(
      assemble_prompt(StepKind::Critique, variant, ctx, config.prompts, config.decoding));
  ledger.record(kind, resp);
  return parse_llm_critique(resp.text);
}

}  // namespace

Critique critique_candidate(Variant variant, const Candidate& candidate, const PromptContext& ctx,
                            ChatBackend& backend, const RunConfig& config, CostLedger& ledger) {
  if (!has_loop(variant)) throw PreconditionError("the baseline variant has no critique step");
  Critique out;
  if (!candidate.diagram) {
    out.items.push_back({CritiqueTag::parse(), CritiqueSource::Algorithmic,
                         "The candidate could not be read as CSV: " + candidate.parse_error +
                             ". Return the diagram strictly in the output format."});
    return out;
  }
  PromptContext critique_ctx = ctx;
  critique_ctx.candidate = candidate.csv;

  if (structural_by_algorithm(variant)) {
    out = render_critique(validate(*candidate.diagram));
    if (alignment_checked(variant)) {
      out.append(llm_critique(variant, CallKind::AlignmentCritique, critique_ctx, backend, config, ledger));
    }
  } else if (alignment_checked(variant)) {
    out = llm_critique(variant, CallKind::CombinedCritique, critique_ctx, backend, config, ledger);
  } else {
    out = llm_critique(variant, CallKind::StructuralCritique, critique_ctx, backend, config, ledger);
  }
  return out;
}

RunRecord run(const std::string& description, ChatBackend& backend, const RunConfig& config) {
  if (description.empty()) throw PreconditionError("process description is empty");
  const Variant variant = config.variant;
  RunRecord record;
  record.variant = variant;

  auto adopt = [&](const Candidate& c) {
    record.final = c.diagram;
    record.final_csv = c.csv;
  };

  try {
    for (int attempt = 0; attempt <= (has_loop(variant) ? config.restart_limit : 0); ++attempt) {
      record.attempts.emplace_back();
      record.restarted = attempt > 0;
      AttemptRecord& log = record.attempts.back();
      PromptContext ctx;
      ctx.description = description;

      auto gen = backend.complete(
          assemble_prompt(StepKind::Generate, variant, ctx, config.prompts, config.decoding));
      record.cost.record(CallKind::Generate, gen);
      Candidate candidate = Candidate::from_reply(gen.text);
      log.candidates.push_back(candidate.csv);
      adopt(candidate);

      if (!has_loop(variant)) {
        record.accepted = candidate.diagram.has_value();
        break;
      }

      for (int iteration = 0; iteration < config.iteration_cap; ++iteration) {
        Critique critique = critique_candidate(variant, candidate, ctx, backend, config, record.cost);
        log.critiques.push_back(critique);
        if (critique.empty()) {
          record.accepted = true;
          break;
        }
        if (iteration + 1 == config.iteration_cap) break;

        PromptContext refine_ctx = ctx;
        refine_ctx.candidate = candidate.csv;
        refine_ctx.critique = critique;
        for (std::size_t i = 0; i + 1 < log.candidates.size(); ++i) {
          refine_ctx.history.push_back(log.candidates[i]);
        }
        auto ref = backend.complete(
            assemble_prompt(StepKind::Refine, variant, refine_ctx, config.prompts, config.decoding));
        record.cost.record(CallKind::Refine, ref);
        candidate = Candidate::from_reply(ref.text);
        log.candidates.push_back(candidate.csv);
        adopt(candidate);
      }
      if (record.accepted) break;
    }
  } catch (const Error& e) {
    if (dynamic_cast<const PreconditionError*>(&e)) throw;
    throw RunAborted(std::move(record), e.what());
  }
  if (!record.accepted) {
    record.warnings.push_back(has_loop(variant)
                                  ? "no candidate passed the critique after " +
                                        std::to_string(record.attempts.size()) +
                                        " attempt(s); returning the last candidate"
                                  : "generated candidate could not be parsed");
  }
  if (record.cost.usage_gaps > 0) {
    record.warnings.push_back(std::to_string(record.cost.usage_gaps) +
                              " response(s) had unreadable usage; counted as zero");
  }
  return record;
}

}  // namespace actdiag
