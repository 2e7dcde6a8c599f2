#include <doctest.h>

#include <filesystem>

#include "actdiag/csv_codec.hpp"
#include "actdiag/dataset.hpp"
#include "actdiag/errors.hpp"
#include "actdiag/prompts.hpp"
#include "actdiag/validator.hpp"

using namespace actdiag;
namespace ps = prompt_section;

namespace {

bool has(const std::string& text, std::string_view needle) { return text.find(needle) != std::string::npos; }

PromptContext full_context() {
  PromptContext ctx;
  ctx.description = "Restart the stuck program.";
  ctx.candidate = "c1, initial, , ;\nc2, end, c1, ;\n";
  ctx.history = {"h1, initial, , ;\n"};
  ctx.critique = Critique{{{CritiqueTag::of(ConstraintId::SC2), CritiqueSource::Algorithmic, "no end"}}};
  return ctx;
}

}  // namespace

TEST_CASE("element matrix per step") {
  const auto fx = PromptFixtures::defaults();
  const auto ctx = full_context();

  auto gen = assemble_prompt(StepKind::Generate, Variant::StructAlgAlignLlm, ctx, fx);
  CHECK(gen.role_definition == fx.generator_role);
  for (auto s : {ps::kConstraints, ps::kDescription, ps::kFormat, ps::kExample}) CHECK(has(gen.body, s));
  for (auto s : {ps::kCandidate, ps::kHistory, ps::kCritique}) CHECK_FALSE(has(gen.body, s));

  auto crit = assemble_prompt(StepKind::Critique, Variant::StructLlmAlignLlm, ctx, fx);
  CHECK(crit.role_definition == fx.critic_role);
  for (auto s : {ps::kConstraints, ps::kDescription, ps::kCandidate}) CHECK(has(crit.body, s));
  for (auto s : {ps::kFormat, ps::kExample, ps::kHistory, ps::kCritique}) CHECK_FALSE(has(crit.body, s));

  auto ref = assemble_prompt(StepKind::Refine, Variant::StructLlmAlignNa, ctx, fx);
  CHECK(ref.role_definition == fx.refiner_role);
  std::size_t last = 0;
  for (auto s : {ps::kConstraints, ps::kDescription, ps::kFormat, ps::kExample, ps::kCandidate, ps::kHistory,
                 ps::kCritique}) {
    auto at = ref.body.find(s);
    REQUIRE(at != std::string::npos);
    CHECK(at >= last);
    last = at;
  }
  CHECK(has(ref.body, "1. [SC2] no end"));
  CHECK(has(ref.body, "Rejected candidate 1:\nh1, initial, , ;"));
}

TEST_CASE("constraint scope per variant") {
  const auto fx = PromptFixtures::defaults();
  const auto ctx = full_context();
  for (auto v : kAllVariants) {
    for (auto step : {StepKind::Generate, StepKind::Refine}) {
      auto body = assemble_prompt(step, v, ctx, fx).body;
      for (auto id : kStructuralConstraints) CHECK(has(body, constraint_text(id)));
      for (auto id : kAlignmentConstraints) CHECK(has(body, constraint_text(id)));
    }
  }
  auto alg_llm = assemble_prompt(StepKind::Critique, Variant::StructAlgAlignLlm, ctx, fx).body;
  for (auto id : kAlignmentConstraints) CHECK(has(alg_llm, constraint_text(id)));
  for (auto id : kStructuralConstraints) CHECK_FALSE(has(alg_llm, constraint_text(id)));
  CHECK(prompt_constraints(StepKind::Critique, Variant::StructAlgAlignLlm) ==
        std::vector<ConstraintId>(std::begin(kAlignmentConstraints), std::end(kAlignmentConstraints)));

  auto llm_na = assemble_prompt(StepKind::Critique, Variant::StructLlmAlignNa, ctx, fx).body;
  for (auto id : kStructuralConstraints) CHECK(has(llm_na, constraint_text(id)));
  for (auto id : kAlignmentConstraints) CHECK_FALSE(has(llm_na, constraint_text(id)));

  CHECK(prompt_constraints(StepKind::Critique, Variant::StructLlmAlignLlm).size() == 11);
  CHECK(prompt_constraints(StepKind::Critique, Variant::StructAlgAlignNa).empty());
  CHECK_THROWS_AS(assemble_prompt(StepKind::Critique, Variant::StructAlgAlignNa, ctx, fx), PreconditionError);
  CHECK_THROWS_AS(assemble_prompt(StepKind::Critique, Variant::Baseline, ctx, fx), PreconditionError);
}

TEST_CASE("missing elements") {
  const auto fx = PromptFixtures::defaults();
  PromptContext ctx;
  CHECK_THROWS_AS(assemble_prompt(StepKind::Generate, Variant::Baseline, ctx, fx), PreconditionError);
  ctx.description = "d";
  CHECK_NOTHROW(assemble_prompt(StepKind::Generate, Variant::Baseline, ctx, fx));
  CHECK_THROWS_AS(assemble_prompt(StepKind::Critique, Variant::StructLlmAlignLlm, ctx, fx), PreconditionError);
  ctx.candidate = "x";
  CHECK_THROWS_AS(assemble_prompt(StepKind::Refine, Variant::StructLlmAlignLlm, ctx, fx), PreconditionError);
}

TEST_CASE("refine with empty history is deterministic") {
  const auto fx = PromptFixtures::defaults();
  auto ctx = full_context();
  ctx.history.clear();
  Decoding d{0.0, 512};
  auto a = assemble_prompt(StepKind::Refine, Variant::StructAlgAlignNa, ctx, fx, d);
  auto b = assemble_prompt(StepKind::Refine, Variant::StructAlgAlignNa, ctx, fx, d);
  CHECK(a.body == b.body);
  CHECK(a.role_definition == b.role_definition);
  CHECK(has(a.body, std::string(ps::kHistory) + "\n(none)\n"));
  CHECK(a.decoding.max_output == 512);
  CHECK(a.step == StepKind::Refine);
}

TEST_CASE("one-shot example is a sound diagram") {
  auto ad = parse_csv(extract_csv_block(PromptFixtures::defaults().one_shot_example));
  CHECK(ad.size() == 10);
  CHECK(validate(ad).sound());
}

TEST_CASE("shipped prompt files match the compiled defaults") {
  const std::string dir = ACTDIAG_PROMPTS_DIR;
  const auto fx = PromptFixtures::defaults();
  CHECK(read_file(dir + "/generator_role.txt") == fx.generator_role);
  CHECK(read_file(dir + "/critic_role.txt") == fx.critic_role);
  CHECK(read_file(dir + "/refiner_role.txt") == fx.refiner_role);
  CHECK(read_file(dir + "/format_definition.txt") == fx.format_definition);
  CHECK(read_file(dir + "/one_shot_example.txt") == fx.one_shot_example);
}

TEST_CASE("prompt fixtures load with fallbacks") {
  auto dir = std::filesystem::temp_directory_path() / "actdiag_prompt_fixture";
  std::filesystem::remove_all(dir);
  write_file((dir / "critic_role.txt").string(), "Be strict.\n");
  auto f = PromptFixtures::load(dir.string());
  CHECK(f.critic_role == "Be strict.\n");
  CHECK(f.generator_role == PromptFixtures::defaults().generator_role);
  std::filesystem::remove_all(dir);
}

TEST_CASE("variant names") {
  for (auto v : kAllVariants) CHECK(parse_variant(to_string(v)) == v);
  CHECK_FALSE(parse_variant("ladex").has_value());
  CHECK(has_loop(Variant::StructLlmAlignNa));
  CHECK_FALSE(has_loop(Variant::Baseline));
}

TEST_CASE("llm critique parsing") {
  CHECK(parse_llm_critique("NO ISSUES").empty());
  CHECK(parse_llm_critique("  no issues.\n").empty());
  auto c = parse_llm_critique("Here is what I found:\n1. [SC5] Decision n4 has one branch\n   and no guard.\n"
                              "2. AC3: step order differs\n3) the labels are vague\n");
  REQUIRE(c.items.size() == 3);
  CHECK(c.items[0].tag == CritiqueTag::of(ConstraintId::SC5));
  CHECK(c.items[0].message.find("and no guard.") != std::string::npos);
  CHECK(c.items[0].source == CritiqueSource::Llm);
  CHECK(c.items[1].tag == CritiqueTag::of(ConstraintId::AC3));
  CHECK(c.items[2].tag == CritiqueTag::untagged());
  auto opaque = parse_llm_critique("The diagram looks odd.");
  REQUIRE(opaque.items.size() == 1);
  CHECK(opaque.items[0].tag == CritiqueTag::untagged());
  CHECK(opaque.items[0].message == "The diagram looks odd.");
  CHECK(format_critique(c).rfind("1. [SC5] ", 0) == 0);
}
