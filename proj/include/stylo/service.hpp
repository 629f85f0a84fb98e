#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "stylo/error.hpp"
#include "stylo/learners.hpp"
#include "stylo/translation.hpp"

namespace stylo {

/// Raised when the service cannot start (e.g. the port is taken).
class StartupError : public Error {
 public:
  using Error::Error;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  /// model_id -> model file.
  std::map<std::string, std::filesystem::path> models;
  std::string backend = "identity";
  std::optional<std::filesystem::path> cache_dir;
  /// Directory served at / for the browser workbench, if any.
  std::optional<std::filesystem::path> static_dir;
  std::size_t default_k = 10;
};

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

/// Local attribution service. Models are loaded once and shared read-only
/// across request threads; the translation backend serialises its own calls.
class Service {
 public:
  explicit Service(ServiceConfig config);
  /// For tests: serve already-loaded models with the given backend.
  Service(ServiceConfig config, std::map<std::string, TrainedModel> models,
          std::unique_ptr<TranslationBackend> backend);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Routes one request without any socket; the HTTP server calls this too.
  HttpReply handle(const std::string& method, const std::string& path, const std::string& body) const;

  /// Binds the listening socket; throws StartupError on failure. Returns the port.
  int bind();
  /// Serves until stop() is called. bind() must have succeeded.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace stylo
