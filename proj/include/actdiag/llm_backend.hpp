#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "actdiag/errors.hpp"

namespace actdiag {

/// Which pipeline step a request belongs to.
enum class StepKind { Generate, Critique, Refine };
std::string_view to_string(StepKind step);
std::optional<StepKind> parse_step_kind(std::string_view token);

struct Decoding {
  std::optional<double> temperature;
  std::optional<int> max_output;
};

struct ChatRequest {
  StepKind step = StepKind::Generate;
  std::string role_definition;
  std::string body;
  Decoding decoding;
};

struct Usage {
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  std::uint64_t reasoning_tokens = 0;

  friend bool operator==(const Usage&, const Usage&) = default;
};

struct ChatResponse {
  std::string text;
  Usage usage;
  bool usage_malformed = false;  ///< usage could not be read and was zeroed
};

/// Raised when a backend gives up; carries how many attempts were made.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, int attempts)
      : Error(what + " (after " + std::to_string(attempts) + " attempt(s))"), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class ScriptExhausted : public Error {
 public:
  using Error::Error;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

/// One canned reply. Without explicit usage, tokens are estimated as
/// ceil(bytes / 4) of the prompt and of the reply; reasoning tokens are 0.
struct ScriptEntry {
  std::string text;
  std::optional<Usage> usage;
};

/// Replays canned responses per step kind, in order. Running past the end of
/// a step's script throws ScriptExhausted.
class ScriptedBackend final : public ChatBackend {
 public:
  ScriptedBackend() = default;
  explicit ScriptedBackend(std::map<StepKind, std::vector<ScriptEntry>> script);
  ScriptedBackend(ScriptedBackend&& other) noexcept;
  ScriptedBackend& operator=(ScriptedBackend&&) = delete;

  void add(StepKind step, ScriptEntry entry);
  ChatResponse complete(const ChatRequest& request) override;

  std::size_t invocations(StepKind step) const;
  std::size_t remaining(StepKind step) const;

  /// Reads the script text format:
  ///
  ///     === generate
  ///     n1, initial, , ;
  ///     ...
  ///     === critique usage=120,30,0
  ///     NO ISSUES
  ///
  /// A line "=== <step>[ usage=in,out,reasoning]" opens a record; the lines up
  /// to the next header are its text (trailing newline dropped). Lines before
  /// the first header must be blank or start with '#'.
  static ScriptedBackend parse(std::string_view text);
  static ScriptedBackend load(const std::string& path);

 private:
  mutable std::mutex mutex_;
  std::map<StepKind, std::vector<ScriptEntry>> script_;
  std::map<StepKind, std::size_t> next_;
};

/// How temperature is chosen when a request does not set one.
enum class ModelKind { InstructionFollowing, Reasoning };

struct ChatEndpoint {
  std::string url = "https://api.openai.com/v1/chat/completions";
  std::string model;
  std::string auth_env = "OPENAI_API_KEY";
  ModelKind kind = ModelKind::InstructionFollowing;
  /// Instruction-following models default to 0.0; reasoning models send no
  /// temperature unless one is configured here.
  std::optional<double> temperature;
  int max_retries = 3;
  int initial_backoff_ms = 500;
  int timeout_seconds = 120;
};

/// Client for OpenAI-compatible chat-completions endpoints. Retries transport
/// errors and 408/409/429/5xx responses with exponential backoff.
class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(ChatEndpoint endpoint);
  ChatResponse complete(const ChatRequest& request) override;

  std::optional<double> effective_temperature(const ChatRequest& request) const;

 private:
  ChatEndpoint endpoint_;
};

/// Reads usage from a chat-completions JSON body. Returns nullopt when the
/// usage block is missing or malformed.
std::optional<Usage> parse_usage(std::string_view response_body);

}  // namespace actdiag
