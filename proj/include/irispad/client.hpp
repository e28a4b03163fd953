#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "irispad/error.hpp"
#include "irispad/prompt.hpp"

namespace irispad {

enum class Dialect { ChatCompletions, GenerateContent };

std::string_view to_string(Dialect d);
std::optional<Dialect> parse_dialect(std::string_view token);

struct EndpointConfig {
  Dialect dialect = Dialect::ChatCompletions;
  /// Scheme, host, port and optional path prefix, e.g.
  /// "http://127.0.0.1:8080/api" or "https://generativelanguage.googleapis.com/v1beta".
  std::string base_url;
  std::string model;
  /// Name of the environment variable holding the bearer token; empty means
  /// no authentication.
  std::string auth_token_env;
  int max_retries = 10;
  int max_in_flight = 4;
  std::chrono::milliseconds min_request_spacing{0};
  std::chrono::milliseconds request_timeout{300000};

  void validate() const;
};

struct ModelResponse {
  std::string raw_text;
  double confidence = 0.0;
  int attempts = 0;
  std::size_t prompt_token_estimate = 0;
  std::chrono::milliseconds wall_time{0};
};

/// First decimal literal in `raw` whose value lies in [0, 1], scanning left to
/// right. Literals glued to letters, followed by '%', or written in
/// scientific notation are not considered. Out-of-range literals are skipped.
std::optional<double> extract_confidence(std::string_view raw);

/// All standalone decimal literals in `raw`, in order, as (token, value).
std::vector<std::pair<std::string, double>> numeric_tokens(std::string_view raw);

struct ModelRequest {
  std::string sample_id;
  std::string variant_label;  // empty for MESH requests
  std::string text;
  std::filesystem::path image_ref;
};

/// One round trip to a model. Implementations throw Error(TransportError)
/// for retryable failures and Error(AuthError) / Error(ImageMissing) for
/// fatal ones.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string complete(const ModelRequest& request) = 0;
};

/// Append-only JSON-lines audit log of every request/response pair.
class TranscriptLog {
 public:
  explicit TranscriptLog(std::filesystem::path path);

  void record(const ModelRequest& request, int attempt,
              std::string_view outcome, std::string_view body);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mu_;
};

/// Enforces a minimum gap between consecutive request starts across all
/// workers sharing it.
class RequestSpacer {
 public:
  explicit RequestSpacer(std::chrono::milliseconds spacing)
      : spacing_(spacing) {}

  /// Blocks until this caller may start a request.
  void acquire();

 private:
  std::chrono::milliseconds spacing_;
  std::mutex mu_;
  std::optional<std::chrono::steady_clock::time_point> next_;
};

struct RetryPolicy {
  int max_retries = 10;
  RequestSpacer* spacer = nullptr;
  TranscriptLog* log = nullptr;
};

/// Sends the identical request until a confidence can be extracted. Every
/// request (including failed transports) counts as an attempt. Throws
/// Error(RetriesExhausted) once `max_retries` attempts have failed; auth and
/// missing-image errors propagate immediately.
ModelResponse query_with_retry(ModelClient& client,
                               const AssembledPrompt& prompt,
                               const RetryPolicy& policy);

struct BatchItem {
  std::string sample_id;
  std::variant<ModelResponse, Error> outcome;

  bool ok() const { return std::holds_alternative<ModelResponse>(outcome); }
  const ModelResponse& response() const {
    return std::get<ModelResponse>(outcome);
  }
  const Error& error() const { return std::get<Error>(outcome); }
};

struct BatchOptions {
  int max_in_flight = 4;
  int max_retries = 10;
  std::chrono::milliseconds min_request_spacing{0};
  TranscriptLog* log = nullptr;
  /// Called once per prompt as it finishes, serialized under a lock.
  std::function<void(std::size_t index, const BatchItem&)> on_result;
};

/// Dispatches every prompt with at most `max_in_flight` outstanding
/// requests. Results come back in input order; per-sample failures are
/// captured in the item and do not stop the batch.
std::vector<BatchItem> run_batch(ModelClient& client,
                                 const std::vector<AssembledPrompt>& prompts,
                                 const BatchOptions& options);

/// HTTP client speaking either wire dialect. Generation parameters are never
/// sent, so server defaults apply.
class HttpModelClient final : public ModelClient {
 public:
  explicit HttpModelClient(EndpointConfig cfg);

  std::string complete(const ModelRequest& request) override;

  /// Request body for `request` in the configured dialect.
  std::string build_body(const ModelRequest& request) const;

  /// Extracts the reply text; throws Error(TransportError) on malformed
  /// bodies.
  static std::string parse_reply(Dialect dialect, std::string_view body);

  /// Request path (prefix included) for the configured dialect.
  std::string request_path() const;

 private:
  EndpointConfig cfg_;
  std::string origin_;
  std::string prefix_;
  std::optional<std::string> token_;
};

std::string base64_encode(std::string_view bytes);

std::string image_mime_type(const std::filesystem::path& path);

}  // namespace irispad
