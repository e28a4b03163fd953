#include "irispad/client.hpp"

#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "irispad/text_util.hpp"

namespace irispad {

using json = nlohmann::json;

std::string_view to_string(Dialect d) {
  return d == Dialect::ChatCompletions ? "chat_completions" : "generate_content";
}

std::optional<Dialect> parse_dialect(std::string_view token) {
  if (token == "chat_completions") return Dialect::ChatCompletions;
  if (token == "generate_content") return Dialect::GenerateContent;
  return std::nullopt;
}

void EndpointConfig::validate() const {
  if (max_retries < 1) {
    throw Error(ErrorCode::Config, "max_retries", "must be >= 1");
  }
  if (max_in_flight < 1) {
    throw Error(ErrorCode::Config, "max_in_flight", "must be >= 1");
  }
  if (min_request_spacing.count() < 0) {
    throw Error(ErrorCode::Config, "min_request_spacing", "must be >= 0");
  }
  if (base_url.empty()) throw Error(ErrorCode::Config, "base_url", "empty");
  if (dialect == Dialect::GenerateContent && model.empty()) {
    throw Error(ErrorCode::Config, "model",
                "generate_content endpoints need a model name");
  }
}

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<std::pair<std::string, double>> numeric_tokens(
    std::string_view raw) {
  std::vector<std::pair<std::string, double>> out;
  const std::size_t n = raw.size();
  std::size_t i = 0;
  while (i < n) {
    const bool starts_number =
        is_digit(raw[i]) || (raw[i] == '.' && i + 1 < n && is_digit(raw[i + 1]));
    if (!starts_number) {
      ++i;
      continue;
    }
    std::size_t start = i;
    bool negative = false;
    bool glued = start > 0 && (is_word_char(raw[start - 1]) ||
                               raw[start - 1] == '.');
    if (!glued && start > 0 && (raw[start - 1] == '-' || raw[start - 1] == '+')) {
      negative = raw[start - 1] == '-';
      if (start > 1 && is_word_char(raw[start - 2])) negative = false;
    }
    while (i < n && is_digit(raw[i])) ++i;
    if (i + 1 < n && raw[i] == '.' && is_digit(raw[i + 1])) {
      ++i;
      while (i < n && is_digit(raw[i])) ++i;
    }
    std::size_t end = i;
    bool rejected = glued;
    if (i < n) {
      char next = raw[i];
      if (next == 'e' || next == 'E') {
        std::size_t k = i + 1;
        if (k < n && (raw[k] == '+' || raw[k] == '-')) ++k;
        if (k < n && is_digit(raw[k])) {
          // scientific notation: swallow the exponent and drop the token
          i = k;
          while (i < n && is_digit(raw[i])) ++i;
          rejected = true;
        }
      }
      if (i < n && (is_word_char(raw[i]) || raw[i] == '%')) rejected = true;
      if (i + 1 < n && raw[i] == '.' && is_digit(raw[i + 1])) {
        // dotted version string such as 3.2.1
        while (i < n && (is_digit(raw[i]) || raw[i] == '.')) ++i;
        rejected = true;
      }
    }
    if (rejected) continue;
    std::string token(raw.substr(start, end - start));
    std::string parseable = token.front() == '.' ? "0" + token : token;
    double value = 0;
    std::from_chars(parseable.data(), parseable.data() + parseable.size(),
                    value);
    if (negative) {
      token.insert(token.begin(), '-');
      value = -value;
    }
    out.emplace_back(std::move(token), value);
  }
  return out;
}

std::optional<double> extract_confidence(std::string_view raw) {
  for (const auto& [token, value] : numeric_tokens(raw)) {
    if (!std::signbit(value) && value >= 0.0 && value <= 1.0) return value;
  }
  return std::nullopt;
}

TranscriptLog::TranscriptLog(std::filesystem::path path)
    : path_(std::move(path)) {
  if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
}

void TranscriptLog::record(const ModelRequest& request, int attempt,
                           std::string_view outcome, std::string_view body) {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      now.time_since_epoch())
                      .count();
  json line = {
      {"ts_ms", ms},
      {"sample_id", request.sample_id},
      {"variant", request.variant_label},
      {"attempt", attempt},
      {"prompt", request.text},
      {"image", request.image_ref.string()},
      {"outcome", outcome},
      {"response", body},
  };
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::app);
  out << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
}

void RequestSpacer::acquire() {
  if (spacing_.count() <= 0) return;
  std::chrono::steady_clock::time_point start;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    start = next_ && *next_ > now ? *next_ : now;
    next_ = start + spacing_;
  }
  std::this_thread::sleep_until(start);
}

ModelResponse query_with_retry(ModelClient& client,
                               const AssembledPrompt& prompt,
                               const RetryPolicy& policy) {
  if (policy.max_retries < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_retries", "must be >= 1");
  }
  const auto started = std::chrono::steady_clock::now();
  ModelRequest request{prompt.sample_id,
                       prompt.variant ? prompt.variant->label() : std::string{},
                       prompt.text, prompt.image_ref};
  std::string last_error;
  for (int attempt = 1; attempt <= policy.max_retries; ++attempt) {
    if (policy.spacer != nullptr) policy.spacer->acquire();
    std::string raw;
    try {
      raw = client.complete(request);
    } catch (const Error& e) {
      if (policy.log != nullptr) policy.log->record(request, attempt, "error", e.what());
      if (e.code() != ErrorCode::TransportError) throw;
      last_error = e.what();
      continue;
    }
    if (policy.log != nullptr) policy.log->record(request, attempt, "reply", raw);
    if (auto confidence = extract_confidence(raw)) {
      ModelResponse response;
      response.raw_text = std::move(raw);
      response.confidence = *confidence;
      response.attempts = attempt;
      response.prompt_token_estimate = prompt.token_estimate;
      response.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started);
      return response;
    }
    last_error = "no confidence value in response";
  }
  throw Error(ErrorCode::RetriesExhausted, std::to_string(policy.max_retries),
              last_error);
}

std::vector<BatchItem> run_batch(ModelClient& client,
                                 const std::vector<AssembledPrompt>& prompts,
                                 const BatchOptions& options) {
  if (options.max_in_flight < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_in_flight", "must be >= 1");
  }
  std::vector<std::optional<BatchItem>> slots(prompts.size());
  RequestSpacer spacer(options.min_request_spacing);
  RetryPolicy policy{options.max_retries, &spacer, options.log};
  std::atomic<std::size_t> next{0};
  std::mutex result_mu;

  auto worker = [&] {
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= prompts.size()) return;
      const auto& prompt = prompts[index];
      BatchItem item{prompt.sample_id, Error(ErrorCode::TransportError, prompt.sample_id)};
      try {
        item.outcome = query_with_retry(client, prompt, policy);
      } catch (const Error& e) {
        item.outcome = e;
      } catch (const std::exception& e) {
        item.outcome = Error(ErrorCode::TransportError, prompt.sample_id, e.what());
      }
      std::lock_guard lock(result_mu);
      if (options.on_result) options.on_result(index, item);
      slots[index] = std::move(item);
    }
  };

  const auto workers = std::min<std::size_t>(
      static_cast<std::size_t>(options.max_in_flight), prompts.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  std::vector<BatchItem> out;
  out.reserve(prompts.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

std::string base64_encode(std::string_view bytes) {
  return httplib::detail::base64_encode(std::string(bytes));
}

std::string image_mime_type(const std::filesystem::path& path) {
  const auto ext = text::to_lower(path.extension().string());
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".bmp") return "image/bmp";
  if (ext == ".tif" || ext == ".tiff") return "image/tiff";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  return "application/octet-stream";
}

HttpModelClient::HttpModelClient(EndpointConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const auto scheme_end = cfg_.base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::Config, "base_url",
                "expected scheme://host[:port][/prefix]");
  }
  const auto path_start = cfg_.base_url.find('/', scheme_end + 3);
  origin_ = cfg_.base_url.substr(0, path_start);
  if (path_start != std::string::npos) {
    prefix_ = cfg_.base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
  if (!cfg_.auth_token_env.empty()) {
    const char* value = std::getenv(cfg_.auth_token_env.c_str());
    if (value == nullptr || *value == '\0') {
      throw Error(ErrorCode::AuthError, cfg_.auth_token_env,
                  "environment variable is not set");
    }
    token_ = value;
  }
}

std::string HttpModelClient::request_path() const {
  if (cfg_.dialect == Dialect::ChatCompletions) {
    return prefix_ + "/chat/completions";
  }
  return prefix_ + "/models/" + cfg_.model + ":generateContent";
}

std::string HttpModelClient::build_body(const ModelRequest& request) const {
  if (!std::filesystem::is_regular_file(request.image_ref)) {
    throw Error(ErrorCode::ImageMissing, request.image_ref.string());
  }
  const auto image = base64_encode(text::read_file(request.image_ref));
  const auto mime = image_mime_type(request.image_ref);
  json body;
  if (cfg_.dialect == Dialect::ChatCompletions) {
    if (!cfg_.model.empty()) body["model"] = cfg_.model;
    body["stream"] = false;
    body["messages"] = json::array({{
        {"role", "user"},
        {"content",
         json::array({
             {{"type", "text"}, {"text", request.text}},
             {{"type", "image_url"},
              {"image_url", {{"url", "data:" + mime + ";base64," + image}}}},
         })},
    }});
  } else {
    body["contents"] = json::array({{
        {"role", "user"},
        {"parts", json::array({
                      {{"text", request.text}},
                      {{"inline_data", {{"mime_type", mime}, {"data", image}}}},
                  })},
    }});
  }
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string HttpModelClient::parse_reply(Dialect dialect,
                                         std::string_view body) {
  auto parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded()) {
    throw Error(ErrorCode::TransportError, "body", "response is not JSON");
  }
  try {
    if (dialect == Dialect::ChatCompletions) {
      const auto& content = parsed.at("choices").at(0).at("message").at("content");
      if (content.is_string()) return content.get<std::string>();
      std::string out;
      for (const auto& part : content) {
        if (part.contains("text")) out += part.at("text").get<std::string>();
      }
      return out;
    }
    std::string out;
    for (const auto& part :
         parsed.at("candidates").at(0).at("content").at("parts")) {
      if (part.contains("text")) out += part.at("text").get<std::string>();
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::TransportError, "body",
                std::string("unexpected response shape: ") + e.what());
  }
}

std::string HttpModelClient::complete(const ModelRequest& request) {
  const auto body = build_body(request);
  httplib::Client http(origin_);
  http.set_connection_timeout(10);
  http.set_read_timeout(cfg_.request_timeout);
  http.set_write_timeout(cfg_.request_timeout);
  httplib::Headers headers{{"X-Sample-Id", request.sample_id}};
  if (!request.variant_label.empty()) {
    headers.emplace("X-Variant", request.variant_label);
  }
  if (token_) headers.emplace("Authorization", "Bearer " + *token_);

  auto res = http.Post(request_path(), headers, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::TransportError, origin_,
                httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw Error(ErrorCode::AuthError, std::to_string(res->status), res->body);
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::TransportError, "HTTP " + std::to_string(res->status),
                res->body);
  }
  return parse_reply(cfg_.dialect, res->body);
}

}  // namespace irispad
