#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "actdiag/critique.hpp"
#include "actdiag/diagram.hpp"
#include "actdiag/llm_backend.hpp"
#include "actdiag/prompts.hpp"

namespace actdiag {

/// What a backend call was for.
enum class CallKind { Generate, StructuralCritique, AlignmentCritique, CombinedCritique, Refine };
std::string_view to_string(CallKind kind);

/// Backend calls and token totals of one run.
struct CostLedger {
  std::uint64_t calls = 0;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  std::uint64_t reasoning_tokens = 0;
  std::uint64_t usage_gaps = 0;  ///< responses whose usage could not be read
  std::map<CallKind, std::uint64_t> calls_by_kind;

  void record(CallKind kind, const Usage& usage);
  void record(CallKind kind, const ChatResponse& response);
  std::uint64_t calls_of(CallKind kind) const;
  CostLedger& operator+=(const CostLedger& other);

  friend bool operator==(const CostLedger&, const CostLedger&) = default;
};

struct RunConfig {
  Variant variant = Variant::StructAlgAlignLlm;
  int iteration_cap = 5;  ///< critiques per attempt
  int restart_limit = 1;  ///< fresh generations after an attempt exhausts the cap
  PromptFixtures prompts = PromptFixtures::defaults();
  Decoding decoding;

  /// Keys: variant, iteration_cap, restart_limit, prompt_dir, temperature, max_output.
  static RunConfig from_json(std::string_view text, const std::string& base_dir = ".");
};

/// A candidate as produced by the LLM: the extracted CSV and, when it parses,
/// the diagram; otherwise the parse error text.
struct Candidate {
  std::string csv;
  std::optional<ActivityDiagram> diagram;
  std::string parse_error;

  static Candidate from_reply(std::string_view reply);
};

struct AttemptRecord {
  std::vector<std::string> candidates;  ///< every candidate of the attempt, as CSV
  std::vector<Critique> critiques;      ///< critiques[i] judges candidates[i]
};

struct RunRecord {
  Variant variant = Variant::Baseline;
  std::vector<AttemptRecord> attempts;
  std::optional<ActivityDiagram> final;  ///< absent when the last candidate did not parse
  std::string final_csv;
  bool accepted = false;
  bool restarted = false;
  CostLedger cost;
  std::vector<std::string> warnings;

  /// Rejected candidates across all attempts, in order.
  std::vector<std::string> candidate_history() const;
  std::vector<Critique> critiques() const;
};

/// A backend failure ended the run; the partial record is kept.
class RunAborted : public Error {
 public:
  RunAborted(RunRecord partial, const std::string& cause)
      : Error("run aborted: " + cause), record_(std::move(partial)) {}
  const RunRecord& record() const noexcept { return record_; }

 private:
  RunRecord record_;
};

/// Critique step. Structural findings come from the validator (Alg variants)
/// or from the LLM; alignment findings come from the LLM when the variant
/// checks alignment. Structural-LLM-with-alignment variants ask both in one
/// call. Structural items come first. A candidate that failed to parse gets a
/// single "parse" item and no LLM call. Every backend call is added to `ledger`.
Critique critique_candidate(Variant variant, const Candidate& candidate, const PromptContext& ctx,
                            ChatBackend& backend, const RunConfig& config, CostLedger& ledger);

/// Runs one variant on one description: generate, then critique/refine until a
/// critique comes back empty, restarting from generation when an attempt uses
/// up its critiques. Throws RunAborted on backend failure.
RunRecord run(const std::string& description, ChatBackend& backend, const RunConfig& config);

}  // namespace actdiag
