#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace irispad {

/// What the mock does for one (sample, attempt). Fields combine: a delay is
/// applied before answering with the status, raw body or text reply.
struct MockAction {
  std::optional<int> http_status;
  std::optional<int> delay_ms;
  std::optional<std::string> text;
  /// Sent verbatim instead of the dialect's JSON envelope.
  std::optional<std::string> body;
};

/// Line-delimited `sample_id | attempt | kind | payload` records.
///
/// `sample_id` may be a bare id, `<variant>/<id>` to target one prompt
/// variant, or `*` as a catch-all. `attempt` is a 1-based number or `*`.
/// `kind` is text, http_status, delay_ms, or body. Text payloads decode
/// `\n` and `\\` escapes.
///
/// Resolution for a request: the most specific key with any entries wins
/// (variant/id, then id, then *); within it the exact attempt, then the `*`
/// attempt, then the highest scripted attempt below the requested one.
class MockScript {
 public:
  static MockScript parse(std::string_view content);
  static MockScript load(const std::filesystem::path& path);

  void add(const std::string& key, std::optional<int> attempt,
           const MockAction& action);

  /// Plain text reply for `key` on `attempt`.
  void add_text(const std::string& key, int attempt, std::string text);

  std::optional<MockAction> resolve(std::string_view variant,
                                    std::string_view sample_id,
                                    int attempt) const;

  std::string format() const;

  std::size_t size() const;

 private:
  // key -> attempt (0 means '*') -> action
  std::map<std::string, std::map<int, MockAction>, std::less<>> entries_;
};

struct ObservedRequest {
  std::string key;  // "<variant>/<sample_id>" or "<sample_id>"
  int attempt = 0;
  std::string path;
  std::string body;
  std::string authorization;
};

/// In-process HTTP server answering both wire dialects from a script.
/// Attempts are counted per request key.
class MockServer {
 public:
  /// Port 0 binds any free port. Throws Error(PortInUse) if binding fails.
  MockServer(MockScript script, int port = 0,
             std::string host = "127.0.0.1");
  ~MockServer();

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  int port() const { return port_; }
  std::string base_url() const;

  /// Number of requests seen for `key`.
  int observed(std::string_view key) const;
  std::size_t total_requests() const;
  std::vector<ObservedRequest> requests() const;

  /// Blocks until stop() is called from another thread or the process ends.
  void wait();
  void stop();

 private:
  MockScript script_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::string host_;
  mutable std::mutex mu_;
  std::map<std::string, int, std::less<>> counts_;
  std::vector<ObservedRequest> log_;
};

}  // namespace irispad
