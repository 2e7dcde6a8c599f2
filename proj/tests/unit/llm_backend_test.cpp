#include <doctest.h>

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "actdiag/llm_backend.hpp"
#include "stub_server.hpp"

using namespace actdiag;
using nlohmann::json;

namespace {

ChatRequest request(StepKind step, std::string body = "describe the process") {
  ChatRequest r;
  r.step = step;
  r.role_definition = "You are a modeller.";
  r.body = std::move(body);
  return r;
}

std::string completion(const std::string& text, const json& usage) {
  json doc{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}})}};
  if (!usage.is_null()) doc["usage"] = usage;
  return doc.dump();
}

ChatEndpoint endpoint_for(const testsupport::StubServer& server) {
  ChatEndpoint e;
  e.url = server.url("/v1/chat/completions");
  e.model = "test-model";
  e.auth_env = "ACTDIAG_TEST_CHAT_KEY";
  e.initial_backoff_ms = 1;
  e.timeout_seconds = 5;
  return e;
}

}  // namespace

TEST_CASE("scripted backend replays per step and then stops") {
  ScriptedBackend backend;
  backend.add(StepKind::Generate, {"first", std::nullopt});
  backend.add(StepKind::Critique, {"NO ISSUES", Usage{7, 3, 1}});
  auto r = backend.complete(request(StepKind::Generate, std::string(40, 'x')));
  CHECK(r.text == "first");
  CHECK(backend.invocations(StepKind::Generate) == 1);
  CHECK(backend.remaining(StepKind::Generate) == 0);
  CHECK(r.usage.output_tokens == 2);
  CHECK(r.usage.input_tokens == (std::string("You are a modeller.").size() + 40 + 3) / 4);
  CHECK(r.usage.reasoning_tokens == 0);
  CHECK(backend.complete(request(StepKind::Critique)).usage == Usage{7, 3, 1});
  CHECK_THROWS_WITH_AS(backend.complete(request(StepKind::Generate)), doctest::Contains("script exhausted"),
                       ScriptExhausted);
  CHECK_THROWS_AS(backend.complete(request(StepKind::Refine)), ScriptExhausted);
}

TEST_CASE("script text format") {
  auto backend = ScriptedBackend::parse(
      "# comment\n"
      "\n"
      "=== generate\n"
      "a, initial, , ;\n"
      "b, end, a, ;\n"
      "=== critique usage=120,30,5\n"
      "1. SC5: fix it\n"
      "=== critique\n"
      "NO ISSUES\n");
  CHECK(backend.remaining(StepKind::Generate) == 1);
  CHECK(backend.remaining(StepKind::Critique) == 2);
  CHECK(backend.complete(request(StepKind::Generate)).text == "a, initial, , ;\nb, end, a, ;");
  auto c = backend.complete(request(StepKind::Critique));
  CHECK(c.text == "1. SC5: fix it");
  CHECK(c.usage == Usage{120, 30, 5});
  CHECK(backend.complete(request(StepKind::Critique)).text == "NO ISSUES");

  CHECK_THROWS_WITH(ScriptedBackend::parse("hello\n=== generate\nx\n"), doctest::Contains("line 1"));
  CHECK_THROWS_WITH(ScriptedBackend::parse("=== summarise\nx\n"), doctest::Contains("unknown step kind"));
  CHECK_THROWS_WITH(ScriptedBackend::parse("=== refine usage=1,2\nx\n"), doctest::Contains("three"));
  CHECK_THROWS_AS(ScriptedBackend::load("/nonexistent/actdiag.script"), Error);
}

TEST_CASE("http backend records usage verbatim") {
  testsupport::StubServer server("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion("hello", {{"prompt_tokens", 10}, {"completion_tokens", 5}}), "application/json");
  });
  ::setenv("ACTDIAG_TEST_CHAT_KEY", "sk-test", 1);
  HttpChatBackend backend(endpoint_for(server));
  auto r = backend.complete(request(StepKind::Generate));
  CHECK(r.text == "hello");
  CHECK(r.usage == Usage{10, 5, 0});
  CHECK_FALSE(r.usage_malformed);
  REQUIRE(server.hits() == 1);
  CHECK(server.auth_headers()[0] == "Bearer sk-test");
  auto body = json::parse(server.bodies()[0]);
  CHECK(body["model"] == "test-model");
  CHECK(body["temperature"] == 0.0);
  REQUIRE(body["messages"].size() == 2);
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][1]["content"] == "describe the process");
  ::unsetenv("ACTDIAG_TEST_CHAT_KEY");
}

TEST_CASE("temperature policy") {
  ChatEndpoint e;
  e.url = "http://127.0.0.1:1/v1/chat/completions";
  HttpChatBackend instruct(e);
  CHECK(instruct.effective_temperature(request(StepKind::Generate)) == 0.0);
  auto with_t = request(StepKind::Generate);
  with_t.decoding.temperature = 0.4;
  CHECK(instruct.effective_temperature(with_t) == 0.4);
  e.kind = ModelKind::Reasoning;
  HttpChatBackend reasoning(e);
  CHECK_FALSE(reasoning.effective_temperature(request(StepKind::Generate)).has_value());
  e.temperature = 1.0;
  CHECK(HttpChatBackend(e).effective_temperature(request(StepKind::Generate)) == 1.0);
}

TEST_CASE("http backend retries transient statuses") {
  std::atomic<int> seen{0};
  testsupport::StubServer server("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (++seen < 3) {
      res.status = seen == 1 ? 429 : 503;
      return;
    }
    json usage{{"prompt_tokens", 4},
               {"completion_tokens", 9},
               {"completion_tokens_details", {{"reasoning_tokens", 6}}}};
    res.set_content(completion("ok", usage), "application/json");
  });
  HttpChatBackend backend(endpoint_for(server));
  auto r = backend.complete(request(StepKind::Refine));
  CHECK(r.text == "ok");
  CHECK(r.usage == Usage{4, 9, 6});
  CHECK(server.hits() == 3);
}

TEST_CASE("http backend gives up with the attempt count") {
  SUBCASE("permanent status") {
    testsupport::StubServer server("/v1/chat/completions",
                                   [](const httplib::Request&, httplib::Response& res) { res.status = 401; });
    HttpChatBackend backend(endpoint_for(server));
    try {
      backend.complete(request(StepKind::Generate));
      FAIL("expected BackendError");
    } catch (const BackendError& e) {
      CHECK(e.attempts() == 1);
      CHECK(std::string(e.what()).find("401") != std::string::npos);
    }
    CHECK(server.hits() == 1);
  }
  SUBCASE("transient status every time") {
    testsupport::StubServer server("/v1/chat/completions",
                                   [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    auto e = endpoint_for(server);
    e.max_retries = 2;
    HttpChatBackend backend(e);
    try {
      backend.complete(request(StepKind::Generate));
      FAIL("expected BackendError");
    } catch (const BackendError& err) {
      CHECK(err.attempts() == 3);
    }
    CHECK(server.hits() == 3);
  }
}

TEST_CASE("malformed usage is zeroed and flagged") {
  testsupport::StubServer server("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion("text", {{"prompt_tokens", "ten"}}), "application/json");
  });
  HttpChatBackend backend(endpoint_for(server));
  auto r = backend.complete(request(StepKind::Generate));
  CHECK(r.text == "text");
  CHECK(r.usage == Usage{});
  CHECK(r.usage_malformed);

  CHECK_FALSE(parse_usage("{}").has_value());
  CHECK_FALSE(parse_usage("not json").has_value());
  CHECK_FALSE(parse_usage(R"({"usage": {"prompt_tokens": -1, "completion_tokens": 2}})").has_value());
  CHECK(parse_usage(R"({"usage": {"prompt_tokens": 1, "completion_tokens": 2}})") == Usage{1, 2, 0});
}
