#include "actdiag/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace actdiag {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Baseline: return "baseline";
    case Variant::StructLlmAlignLlm: return "struct-llm-align-llm";
    case Variant::StructAlgAlignLlm: return "struct-alg-align-llm";
    case Variant::StructLlmAlignNa: return "struct-llm-align-na";
    case Variant::StructAlgAlignNa: return "struct-alg-align-na";
  }
  return "baseline";
}

std::optional<Variant> parse_variant(std::string_view token) {
  for (auto v : kAllVariants) {
    if (token == to_string(v)) return v;
  }
  return std::nullopt;
}

namespace {

constexpr std::string_view kGeneratorRole =
    "You are a software modelling assistant. You read a textual process description and "
    "produce a UML activity diagram that captures its control flow: actions, decisions with "
    "guard conditions, parallel flows, and end points. You follow the constraints and the "
    "output format exactly.\n";

constexpr std::string_view kCriticRole =
    "You are a reviewer of UML activity diagrams. You check a candidate diagram, given in CSV "
    "form, against the listed constraints and the process description. Report every violation "
    "as a numbered item that starts with the constraint id in brackets, for example:\n"
    "1. [SC5] Decision node n4 has only one outgoing transition.\n"
    "If the candidate violates none of the listed constraints, reply with exactly: NO ISSUES\n";

constexpr std::string_view kRefinerRole =
    "You are a software modelling assistant. You revise a candidate UML activity diagram so "
    "that it resolves every issue in the critique while keeping what was already correct. Do "
    "not repeat mistakes from previously rejected candidates. Return only the revised diagram "
    "in the output format.\n";

constexpr std::string_view kFormatDefinition =
    "Return the diagram as CSV rows inside a ```csv fenced block, one row per incoming "
    "transition of each node:\n"
    "node_id, node_type, predecessor_id, transition_label, node_label;\n"
    "- node_type is one of: action, decision, initial, end.\n"
    "- A node with several predecessors has one row per predecessor.\n"
    "- The initial node has empty predecessor_id and transition_label.\n"
    "- transition_label is empty for unlabelled transitions; transitions leaving a decision "
    "node carry their guard condition in square brackets.\n"
    "- node_label is the action or decision text; give it on the first row of each node.\n"
    "- Wrap any field that contains a comma or a semicolon in double quotes.\n";

constexpr std::string_view kOneShotExample =
    "Process description:\n"
    "To reset a forgotten password, open the login page and select \"Forgot password\". Enter "
    "the account e-mail address. If the address is not registered, show an error and stop. "
    "Otherwise, send a reset link and, at the same time, write an audit log entry. Once both "
    "are done, ask the user to set a new password.\n"
    "\n"
    "Activity diagram:\n"
    "```csv\n"
    "a1, initial, , ;\n"
    "a2, action, a1, , Open the login page and select Forgot password;\n"
    "a3, action, a2, , Enter the account e-mail address;\n"
    "a4, decision, a3, , Is the address registered?;\n"
    "a5, end, a4, [address not registered], Show an error;\n"
    "a6, action, a4, [address registered], Prepare the password reset;\n"
    "a7, action, a6, , Send a reset link;\n"
    "a8, action, a6, , Write an audit log entry;\n"
    "a9, action, a7, , Ask the user to set a new password;\n"
    "a9, action, a8, ;\n"
    "a10, end, a9, ;\n"
    "```\n";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void section(std::ostringstream& out, std::string_view header, std::string_view content) {
  out << header << '\n' << content;
  if (!content.empty() && content.back() != '\n') out << '\n';
  out << '\n';
}

}  // namespace

PromptFixtures PromptFixtures::defaults() {
  return {std::string(kGeneratorRole), std::string(kCriticRole), std::string(kRefinerRole),
          std::string(kFormatDefinition), std::string(kOneShotExample)};
}

PromptFixtures PromptFixtures::load(const std::string& dir) {
  namespace fs = std::filesystem;
  PromptFixtures f = defaults();
  auto maybe = [&](const char* name, std::string& slot) {
    fs::path p = fs::path(dir) / name;
    if (fs::exists(p)) slot = read_file(p);
  };
  maybe("generator_role.txt", f.generator_role);
  maybe("critic_role.txt", f.critic_role);
  maybe("refiner_role.txt", f.refiner_role);
  maybe("format_definition.txt", f.format_definition);
  maybe("one_shot_example.txt", f.one_shot_example);
  return f;
}

std::vector<ConstraintId> prompt_constraints(StepKind step, Variant variant) {
  std::vector<ConstraintId> out;
  const bool structural = step != StepKind::Critique || structural_by_llm(variant);
  const bool alignment = step != StepKind::Critique || alignment_checked(variant);
  if (structural) out.insert(out.end(), std::begin(kStructuralConstraints), std::end(kStructuralConstraints));
  if (alignment) out.insert(out.end(), std::begin(kAlignmentConstraints), std::end(kAlignmentConstraints));
  return out;
}

ChatRequest assemble_prompt(StepKind step, Variant variant, const PromptContext& ctx,
                            const PromptFixtures& fixtures, const Decoding& decoding) {
  if (ctx.description.empty()) throw PreconditionError("prompt requires a process description");
  const bool needs_candidate = step != StepKind::Generate;
  if (needs_candidate && !ctx.candidate) {
    throw PreconditionError(std::string(to_string(step)) + " prompt requires a candidate diagram");
  }
  if (step == StepKind::Refine && !ctx.critique) {
    throw PreconditionError("refine prompt requires a critique");
  }
  const auto constraints = prompt_constraints(step, variant);
  if (constraints.empty()) {
    throw PreconditionError("variant " + std::string(to_string(variant)) +
                            " has no constraints for an LLM critique");
  }

  ChatRequest req;
  req.step = step;
  req.decoding = decoding;
  switch (step) {
    case StepKind::Generate: req.role_definition = fixtures.generator_role; break;
    case StepKind::Critique: req.role_definition = fixtures.critic_role; break;
    case StepKind::Refine: req.role_definition = fixtures.refiner_role; break;
  }

  std::ostringstream body;
  {
    std::ostringstream list;
    bool structural_header = false, alignment_header = false;
    for (auto id : constraints) {
      if (is_structural(id) && !structural_header) {
        list << "Structural constraints:\n";
        structural_header = true;
      } else if (!is_structural(id) && !alignment_header) {
        list << "Alignment constraints:\n";
        alignment_header = true;
      }
      list << to_string(id) << ". " << constraint_text(id) << '\n';
    }
    section(body, prompt_section::kConstraints, list.str());
  }
  section(body, prompt_section::kDescription, ctx.description);
  if (step != StepKind::Critique) {
    section(body, prompt_section::kFormat, fixtures.format_definition);
    section(body, prompt_section::kExample, fixtures.one_shot_example);
  }
  if (needs_candidate) section(body, prompt_section::kCandidate, *ctx.candidate);
  if (step == StepKind::Refine) {
    std::ostringstream hist;
    if (ctx.history.empty()) {
      hist << "(none)\n";
    } else {
      for (std::size_t i = 0; i < ctx.history.size(); ++i) {
        hist << "Rejected candidate " << i + 1 << ":\n" << ctx.history[i];
        if (!ctx.history[i].empty() && ctx.history[i].back() != '\n') hist << '\n';
      }
    }
    section(body, prompt_section::kHistory, hist.str());
    section(body, prompt_section::kCritique, format_critique(*ctx.critique));
  }
  req.body = body.str();
  return req;
}

}  // namespace actdiag
