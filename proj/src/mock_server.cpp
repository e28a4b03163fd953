#include "irispad/mock_server.hpp"

#include <chrono>

#include <httplib.h>
#include <json.hpp>

#include "irispad/error.hpp"
#include "irispad/text_util.hpp"

namespace irispad {

using json = nlohmann::json;

namespace {

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      if (s[i + 1] == 'n') {
        out += '\n';
        ++i;
        continue;
      }
      if (s[i + 1] == '\\') {
        out += '\\';
        ++i;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
    } else if (c == '\\') {
      out += "\\\\";
    } else {
      out += c;
    }
  }
  return out;
}

std::string chat_envelope(const std::string& text) {
  json body = {
      {"object", "chat.completion"},
      {"choices",
       json::array({{{"index", 0},
                     {"message", {{"role", "assistant"}, {"content", text}}},
                     {"finish_reason", "stop"}}})},
  };
  return body.dump();
}

std::string generate_envelope(const std::string& text) {
  json body = {
      {"candidates",
       json::array({{{"content",
                      {{"role", "model"},
                       {"parts", json::array({{{"text", text}}})}}},
                     {"finishReason", "STOP"}}})},
  };
  return body.dump();
}

}  // namespace

void MockScript::add(const std::string& key, std::optional<int> attempt,
                     const MockAction& action) {
  auto& slot = entries_[key][attempt.value_or(0)];
  if (action.http_status) slot.http_status = action.http_status;
  if (action.delay_ms) slot.delay_ms = action.delay_ms;
  if (action.text) slot.text = action.text;
  if (action.body) slot.body = action.body;
}

void MockScript::add_text(const std::string& key, int attempt,
                          std::string text) {
  MockAction action;
  action.text = std::move(text);
  add(key, attempt, action);
}

MockScript MockScript::parse(std::string_view content) {
  MockScript script;
  std::size_t line_no = 0;
  while (!content.empty()) {
    ++line_no;
    auto pos = content.find('\n');
    auto line = content.substr(0, pos);
    content.remove_prefix(pos == std::string_view::npos ? content.size()
                                                        : pos + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::is_skippable(line)) continue;
    const auto where = std::to_string(line_no);
    auto fields = text::split(line, '|', 4);
    if (fields.size() != 4) {
      throw Error(ErrorCode::BadScript, where,
                  "expected 'sample_id | attempt | kind | payload'");
    }
    std::string key(text::trim(fields[0]));
    if (key.empty()) throw Error(ErrorCode::BadScript, where, "empty sample_id");
    auto attempt_token = text::trim(fields[1]);
    std::optional<int> attempt;
    if (attempt_token != "*") {
      auto n = text::parse_int(attempt_token);
      if (!n || *n < 1) {
        throw Error(ErrorCode::BadScript, where, "attempt must be >= 1 or '*'");
      }
      attempt = static_cast<int>(*n);
    }
    auto kind = text::trim(fields[2]);
    // payload keeps its inner spacing; only the delimiter's padding goes
    auto payload = fields[3];
    if (!payload.empty() && payload.front() == ' ') payload.remove_prefix(1);
    while (!payload.empty() && (payload.back() == ' ' || payload.back() == '\t')) {
      payload.remove_suffix(1);
    }
    MockAction action;
    if (kind == "text") {
      action.text = unescape(payload);
    } else if (kind == "body") {
      action.body = unescape(payload);
    } else if (kind == "http_status" || kind == "delay_ms") {
      auto n = text::parse_int(payload);
      if (!n || *n < 0) {
        throw Error(ErrorCode::BadScript, where,
                    std::string(kind) + " needs a non-negative integer");
      }
      if (kind == "http_status") {
        action.http_status = static_cast<int>(*n);
      } else {
        action.delay_ms = static_cast<int>(*n);
      }
    } else {
      throw Error(ErrorCode::BadScript, where,
                  "unknown kind '" + std::string(kind) + "'");
    }
    script.add(key, attempt, action);
  }
  return script;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  return parse(text::read_file(path));
}

std::optional<MockAction> MockScript::resolve(std::string_view variant,
                                              std::string_view sample_id,
                                              int attempt) const {
  std::vector<std::string> keys;
  if (!variant.empty()) {
    keys.push_back(std::string(variant) + "/" + std::string(sample_id));
  }
  keys.emplace_back(sample_id);
  keys.emplace_back("*");
  for (const auto& key : keys) {
    auto it = entries_.find(key);
    if (it == entries_.end() || it->second.empty()) continue;
    const auto& by_attempt = it->second;
    if (auto exact = by_attempt.find(attempt); exact != by_attempt.end()) {
      return exact->second;
    }
    if (auto any = by_attempt.find(0); any != by_attempt.end()) {
      return any->second;
    }
    auto below = by_attempt.lower_bound(attempt);
    if (below != by_attempt.begin()) {
      --below;
      if (below->first != 0) return below->second;
    }
    return std::nullopt;
  }
  return std::nullopt;
}

std::string MockScript::format() const {
  std::string out;
  for (const auto& [key, by_attempt] : entries_) {
    for (const auto& [attempt, action] : by_attempt) {
      const auto prefix =
          key + " | " + (attempt == 0 ? std::string("*") : std::to_string(attempt)) + " | ";
      if (action.delay_ms) out += prefix + "delay_ms | " + std::to_string(*action.delay_ms) + "\n";
      if (action.http_status) out += prefix + "http_status | " + std::to_string(*action.http_status) + "\n";
      if (action.body) out += prefix + "body | " + escape(*action.body) + "\n";
      if (action.text) out += prefix + "text | " + escape(*action.text) + "\n";
    }
  }
  return out;
}

std::size_t MockScript::size() const {
  std::size_t n = 0;
  for (const auto& [key, by_attempt] : entries_) n += by_attempt.size();
  return n;
}

MockServer::MockServer(MockScript script, int port, std::string host)
    : script_(std::move(script)),
      server_(std::make_unique<httplib::Server>()),
      host_(std::move(host)) {
  auto handler = [this](bool chat) {
    return [this, chat](const httplib::Request& req, httplib::Response& res) {
      const auto sample_id = req.get_header_value("X-Sample-Id");
      const auto variant = req.get_header_value("X-Variant");
      const auto key = variant.empty() ? sample_id : variant + "/" + sample_id;
      int attempt = 0;
      {
        std::lock_guard lock(mu_);
        attempt = ++counts_[key];
        log_.push_back({key, attempt, req.path, req.body,
                        req.get_header_value("Authorization")});
      }
      auto action = script_.resolve(variant, sample_id, attempt);
      if (!action) {
        res.status = 404;
        res.set_content("no scripted response for '" + key + "'", "text/plain");
        return;
      }
      if (action->delay_ms) {
        std::this_thread::sleep_for(std::chrono::milliseconds(*action->delay_ms));
      }
      res.status = action->http_status.value_or(200);
      if (action->body) {
        res.set_content(*action->body, "application/json");
      } else if (action->text) {
        res.set_content(chat ? chat_envelope(*action->text)
                             : generate_envelope(*action->text),
                        "application/json");
      } else if (res.status >= 400) {
        res.set_content(json{{"error", {{"code", res.status}}}}.dump(),
                        "application/json");
      } else {
        res.set_content(chat ? chat_envelope("") : generate_envelope(""),
                        "application/json");
      }
    };
  };
  server_->Post(R"(.*/chat/completions)", handler(true));
  server_->Post(R"(.*:generateContent)", handler(false));
  server_->set_payload_max_length(64 * 1024 * 1024);
  // the library default enables SO_REUSEPORT, which lets a second server
  // silently share the port
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  if (port == 0) {
    port_ = server_->bind_to_any_port(host_);
    if (port_ < 0) throw Error(ErrorCode::PortInUse, "0");
  } else {
    if (!server_->bind_to_port(host_, port)) {
      throw Error(ErrorCode::PortInUse, std::to_string(port));
    }
    port_ = port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

MockServer::~MockServer() { stop(); }

std::string MockServer::base_url() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

int MockServer::observed(std::string_view key) const {
  std::lock_guard lock(mu_);
  auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

std::size_t MockServer::total_requests() const {
  std::lock_guard lock(mu_);
  return log_.size();
}

std::vector<ObservedRequest> MockServer::requests() const {
  std::lock_guard lock(mu_);
  return log_;
}

void MockServer::wait() {
  if (thread_.joinable()) thread_.join();
}

void MockServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace irispad
