#include "actdiag/llm_backend.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "http_util.hpp"

namespace actdiag {

using json = nlohmann::json;

std::string_view to_string(StepKind step) {
  switch (step) {
    case StepKind::Generate: return "generate";
    case StepKind::Critique: return "critique";
    case StepKind::Refine: return "refine";
  }
  return "generate";
}

std::optional<StepKind> parse_step_kind(std::string_view token) {
  if (token == "generate") return StepKind::Generate;
  if (token == "critique") return StepKind::Critique;
  if (token == "refine") return StepKind::Refine;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ScriptedBackend

namespace {

std::uint64_t estimate_tokens(std::size_t bytes) { return (bytes + 3) / 4; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

Usage parse_usage_triple(std::string_view spec, std::size_t line_no) {
  std::vector<std::uint64_t> values;
  std::istringstream in{std::string(spec)};
  std::string part;
  bool ok = true;
  while (ok && std::getline(in, part, ',')) {
    auto t = trim(part);
    ok = !t.empty() && t.find_first_not_of("0123456789") == std::string_view::npos;
    if (ok) values.push_back(std::stoull(std::string(t)));
  }
  if (!ok || values.size() != 3) {
    throw Error("script line " + std::to_string(line_no) +
                ": usage must be three non-negative integers 'in,out,reasoning'");
  }
  return {values[0], values[1], values[2]};
}

}  // namespace

ScriptedBackend::ScriptedBackend(std::map<StepKind, std::vector<ScriptEntry>> script)
    : script_(std::move(script)) {}

ScriptedBackend::ScriptedBackend(ScriptedBackend&& other) noexcept
    : script_(std::move(other.script_)), next_(std::move(other.next_)) {}

void ScriptedBackend::add(StepKind step, ScriptEntry entry) {
  std::lock_guard lock(mutex_);
  script_[step].push_back(std::move(entry));
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  auto& entries = script_[request.step];
  auto& index = next_[request.step];
  if (index >= entries.size()) {
    throw ScriptExhausted("script exhausted: no " + std::string(to_string(request.step)) +
                          " response #" + std::to_string(index + 1));
  }
  const ScriptEntry& entry = entries[index++];
  ChatResponse r;
  r.text = entry.text;
  if (entry.usage) {
    r.usage = *entry.usage;
  } else {
    r.usage.input_tokens = estimate_tokens(request.role_definition.size() + request.body.size());
    r.usage.output_tokens = estimate_tokens(entry.text.size());
  }
  return r;
}

std::size_t ScriptedBackend::invocations(StepKind step) const {
  std::lock_guard lock(mutex_);
  auto it = next_.find(step);
  return it == next_.end() ? 0 : it->second;
}

std::size_t ScriptedBackend::remaining(StepKind step) const {
  std::lock_guard lock(mutex_);
  auto it = script_.find(step);
  std::size_t total = it == script_.end() ? 0 : it->second.size();
  auto used = next_.find(step);
  return total - (used == next_.end() ? 0 : used->second);
}

ScriptedBackend ScriptedBackend::parse(std::string_view text) {
  ScriptedBackend backend;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::optional<StepKind> current;
  std::optional<Usage> current_usage;
  std::string body;

  auto flush = [&] {
    if (!current) return;
    if (!body.empty() && body.back() == '\n') body.pop_back();
    backend.script_[*current].push_back({body, current_usage});
    body.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("=== ", 0) == 0) {
      flush();
      std::string_view header = trim(std::string_view(line).substr(4));
      auto space = header.find(' ');
      auto step = parse_step_kind(header.substr(0, space));
      if (!step) {
        throw Error("script line " + std::to_string(line_no) + ": unknown step kind '" +
                    std::string(header.substr(0, space)) + "'");
      }
      current = step;
      current_usage.reset();
      if (space != std::string_view::npos) {
        auto rest = trim(header.substr(space + 1));
        if (rest.rfind("usage=", 0) != 0) {
          throw Error("script line " + std::to_string(line_no) + ": expected usage=in,out,reasoning");
        }
        current_usage = parse_usage_triple(rest.substr(6), line_no);
      }
      continue;
    }
    if (!current) {
      if (!trim(line).empty() && trim(line).front() != '#') {
        throw Error("script line " + std::to_string(line_no) + ": text before the first '=== ' header");
      }
      continue;
    }
    body += line;
    body += '\n';
  }
  flush();
  return backend;
}

ScriptedBackend ScriptedBackend::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read script file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

// ---------------------------------------------------------------------------
// HttpChatBackend

std::optional<Usage> parse_usage(std::string_view response_body) {
  try {
    auto doc = json::parse(response_body);
    if (!doc.contains("usage") || !doc["usage"].is_object()) return std::nullopt;
    const auto& u = doc["usage"];
    auto read = [](const json& v) -> std::optional<std::uint64_t> {
      if (!v.is_number_integer() && !v.is_number_unsigned()) return std::nullopt;
      if (v.is_number_integer() && v.get<std::int64_t>() < 0) return std::nullopt;
      return v.get<std::uint64_t>();
    };
    auto in = u.contains("prompt_tokens") ? read(u["prompt_tokens"]) : std::nullopt;
    auto out = u.contains("completion_tokens") ? read(u["completion_tokens"]) : std::nullopt;
    if (!in || !out) return std::nullopt;
    Usage usage{*in, *out, 0};
    if (u.contains("completion_tokens_details") && u["completion_tokens_details"].is_object()) {
      const auto& d = u["completion_tokens_details"];
      if (d.contains("reasoning_tokens") && !d["reasoning_tokens"].is_null()) {
        auto r = read(d["reasoning_tokens"]);
        if (!r) return std::nullopt;
        usage.reasoning_tokens = *r;
      }
    }
    return usage;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

HttpChatBackend::HttpChatBackend(ChatEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  detail::split_url(endpoint_.url);
}

std::optional<double> HttpChatBackend::effective_temperature(const ChatRequest& request) const {
  if (request.decoding.temperature) return request.decoding.temperature;
  if (endpoint_.temperature) return endpoint_.temperature;
  if (endpoint_.kind == ModelKind::InstructionFollowing) return 0.0;
  return std::nullopt;
}

ChatResponse HttpChatBackend::complete(const ChatRequest& request) {
  auto [origin, path] = detail::split_url(endpoint_.url);

  json body;
  if (!endpoint_.model.empty()) body["model"] = endpoint_.model;
  body["messages"] = json::array();
  if (!request.role_definition.empty()) {
    body["messages"].push_back({{"role", "system"}, {"content", request.role_definition}});
  }
  body["messages"].push_back({{"role", "user"}, {"content", request.body}});
  if (auto t = effective_temperature(request)) body["temperature"] = *t;
  if (request.decoding.max_output) body["max_tokens"] = *request.decoding.max_output;
  const std::string payload = body.dump();

  const int max_attempts = std::max(1, endpoint_.max_retries + 1);
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1) {
      auto delay = std::chrono::milliseconds(
          static_cast<long long>(endpoint_.initial_backoff_ms) << (attempt - 2));
      std::this_thread::sleep_for(delay);
    }
    auto client = detail::make_client(origin, endpoint_.timeout_seconds);
    auto res = client->Post(path, detail::auth_headers(endpoint_.auth_env), payload, "application/json");
    if (!res) {
      last_error = "chat request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "chat endpoint returned HTTP " + std::to_string(res->status);
      if (detail::retriable_status(res->status)) continue;
      throw BackendError(last_error, attempt);
    }

    ChatResponse out;
    try {
      auto doc = json::parse(res->body);
      const auto& content = doc.at("choices").at(0).at("message").at("content");
      out.text = content.is_string() ? content.get<std::string>() : std::string{};
    } catch (const json::exception& e) {
      throw BackendError(std::string("malformed chat response: ") + e.what(), attempt);
    }
    if (auto usage = parse_usage(res->body)) {
      out.usage = *usage;
    } else {
      out.usage_malformed = true;
    }
    return out;
  }
  throw BackendError(last_error, max_attempts);
}

}  // namespace actdiag
