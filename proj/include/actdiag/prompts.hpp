#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "actdiag/critique.hpp"
#include "actdiag/llm_backend.hpp"

namespace actdiag {

/// Pipeline variants: whether the critique-refine loop runs, and how the
/// critique checks structure (LLM or algorithm) and alignment (LLM or not at all).
enum class Variant {
  Baseline,
  StructLlmAlignLlm,
  StructAlgAlignLlm,
  StructLlmAlignNa,
  StructAlgAlignNa,
};

inline constexpr Variant kAllVariants[] = {Variant::Baseline, Variant::StructLlmAlignLlm,
                                           Variant::StructAlgAlignLlm, Variant::StructLlmAlignNa,
                                           Variant::StructAlgAlignNa};

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view token);

constexpr bool has_loop(Variant v) { return v != Variant::Baseline; }
constexpr bool structural_by_llm(Variant v) {
  return v == Variant::StructLlmAlignLlm || v == Variant::StructLlmAlignNa;
}
constexpr bool structural_by_algorithm(Variant v) {
  return v == Variant::StructAlgAlignLlm || v == Variant::StructAlgAlignNa;
}
constexpr bool alignment_checked(Variant v) {
  return v == Variant::StructLlmAlignLlm || v == Variant::StructAlgAlignLlm;
}

/// Editable prompt text. Defaults are compiled in; the same text ships under prompts/.
struct PromptFixtures {
  std::string generator_role;
  std::string critic_role;
  std::string refiner_role;
  std::string format_definition;
  std::string one_shot_example;

  static PromptFixtures defaults();
  /// Reads generator_role.txt, critic_role.txt, refiner_role.txt,
  /// format_definition.txt and one_shot_example.txt from `dir`; files that are
  /// missing keep their default text.
  static PromptFixtures load(const std::string& dir);
};

struct PromptContext {
  std::string description;
  std::optional<std::string> candidate;  ///< current candidate as CSV text
  std::vector<std::string> history;      ///< rejected candidates of this attempt, oldest first
  std::optional<Critique> critique;      ///< critique of the current candidate
};

namespace prompt_section {
inline constexpr std::string_view kConstraints = "### Constraints";
inline constexpr std::string_view kDescription = "### Process Description";
inline constexpr std::string_view kFormat = "### Output Format";
inline constexpr std::string_view kExample = "### Example";
inline constexpr std::string_view kCandidate = "### Candidate Diagram";
inline constexpr std::string_view kHistory = "### Previously Rejected Candidates";
inline constexpr std::string_view kCritique = "### Critique";
}  // namespace prompt_section

/// Constraints that go into a prompt for this step and variant. Generate and
/// refine always get every structural and alignment constraint; critique gets
/// only what the LLM is asked to check.
std::vector<ConstraintId> prompt_constraints(StepKind step, Variant variant);

/// Builds the request for one pipeline step. The role definition is the system
/// message; the body holds the remaining elements in fixed order: constraints,
/// description, output format, example, candidate, history, critique.
/// Throws PreconditionError if the step needs an element `ctx` does not have,
/// or if a critique is requested for a variant with nothing for the LLM to check.
ChatRequest assemble_prompt(StepKind step, Variant variant, const PromptContext& ctx,
                            const PromptFixtures& fixtures, const Decoding& decoding = {});

}  // namespace actdiag
