#include "stylo/service.hpp"

#include <httplib.h>

#include <fmt/format.h>
#include <json.hpp>

#include "stylo/risk.hpp"

namespace stylo {

using nlohmann::json;

struct Service::Impl {
  ServiceConfig config;
  std::map<std::string, TrainedModel> models;
  std::map<std::string, std::string> digests;
  std::unique_ptr<TranslationBackend> backend;
  std::unique_ptr<TranslationCache> cache;
  httplib::Server server;
  int port = 0;

  HttpReply error(int status, const std::string& message) const {
    return {status, json{{"error", message}}.dump()};
  }

  HttpReply health() const {
    json digests_json = json::object();
    for (const auto& [id, d] : digests) digests_json[id] = d;
    json j = {{"status", "ok"}, {"models", digests_json}};
    if (!digests.empty()) j["model_digest"] = digests.begin()->second;
    return {200, j.dump()};
  }

  HttpReply list_models() const {
    json list = json::array();
    for (const auto& [id, m] : models)
      list.push_back({{"model_id", id},
                      {"kind", to_string(m.kind)},
                      {"feature_set", m.feature_set ? std::string(to_string(*m.feature_set)) : std::string()},
                      {"labels", m.label_map},
                      {"digest", digests.at(id)}});
    return {200, json{{"models", list}}.dump()};
  }

  HttpReply attribute(const json& req) const {
    if (!req.contains("text") || !req["text"].is_string()) return error(400, "field 'text' must be a string");
    std::string id;
    if (req.contains("model_id") && req["model_id"].is_string()) {
      id = req["model_id"].get<std::string>();
    } else if (models.size() == 1) {
      id = models.begin()->first;
    } else {
      return error(400, "field 'model_id' is required");
    }
    const auto it = models.find(id);
    if (it == models.end()) return error(404, "unknown model_id: " + id);
    std::size_t k = config.default_k;
    if (req.contains("k")) {
      if (!req["k"].is_number_integer() || req["k"].get<long long>() < 0)
        return error(400, "field 'k' must be a non-negative integer");
      k = req["k"].get<std::size_t>();
    }
    const RiskReport report = risk_report(it->second, req["text"].get<std::string>(), k);
    json j = to_json(report);
    j["model_id"] = id;
    j["model_digest"] = digests.at(id);
    return {200, j.dump()};
  }

  HttpReply roundtrip(const json& req) const {
    if (!req.contains("text") || !req["text"].is_string()) return error(400, "field 'text' must be a string");
    if (!req.contains("route") || !req["route"].is_string()) return error(400, "field 'route' must be a string");
    const Route route = Route::parse(req["route"].get<std::string>());
    try {
      const std::string out = round_trip(req["text"].get<std::string>(), route, *backend, cache.get());
      return {200, json{{"text", out}, {"route", route.to_string()}}.dump()};
    } catch (const TranslationError& e) {
      const bool unsupported = std::string_view(e.what()).find("does not support") != std::string_view::npos;
      return error(unsupported ? 400 : 502, e.what());
    }
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  for (const auto& [id, path] : impl_->config.models) impl_->models.emplace(id, load_model(path));
  impl_->backend = make_backend(impl_->config.backend);
  for (const auto& [id, m] : impl_->models) impl_->digests[id] = model_digest(m);
  if (impl_->config.cache_dir) impl_->cache = std::make_unique<TranslationCache>(*impl_->config.cache_dir);
}

Service::Service(ServiceConfig config, std::map<std::string, TrainedModel> models,
                 std::unique_ptr<TranslationBackend> backend)
    : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  impl_->models = std::move(models);
  impl_->backend = std::move(backend);
  for (const auto& [id, m] : impl_->models) impl_->digests[id] = model_digest(m);
  if (impl_->config.cache_dir) impl_->cache = std::make_unique<TranslationCache>(*impl_->config.cache_dir);
}

Service::~Service() { stop(); }

HttpReply Service::handle(const std::string& method, const std::string& path, const std::string& body) const {
  const Impl& s = *impl_;
  try {
    if (method == "GET" && path == "/health") return s.health();
    if (method == "GET" && path == "/models") return s.list_models();
    if (method == "POST" && (path == "/attribute" || path == "/roundtrip")) {
      const json req = json::parse(body, nullptr, false);
      if (req.is_discarded() || !req.is_object()) return s.error(400, "request body must be a JSON object");
      return path == "/attribute" ? s.attribute(req) : s.roundtrip(req);
    }
    return s.error(404, fmt::format("no route for {} {}", method, path));
  } catch (const InvalidArgument& e) {
    return s.error(400, e.what());
  } catch (const std::exception& e) {
    return s.error(500, e.what());
  }
}

int Service::bind() {
  auto& s = *impl_;
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpReply reply = handle(req.method, req.path, req.body);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  };
  s.server.Get("/health", forward);
  s.server.Get("/models", forward);
  s.server.Post("/attribute", forward);
  s.server.Post("/roundtrip", forward);
  if (s.config.static_dir && !s.server.set_mount_point("/", s.config.static_dir->string()))
    throw StartupError("static directory not found: " + s.config.static_dir->string());
  // The library default adds SO_REUSEPORT, which would let two services share a port.
  s.server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  if (s.config.port == 0) {
    s.port = s.server.bind_to_any_port(s.config.host);
  } else {
    s.port = s.server.bind_to_port(s.config.host, s.config.port) ? s.config.port : -1;
  }
  if (s.port <= 0)
    throw StartupError(fmt::format("cannot listen on {}:{} (port in use?)", s.config.host, s.config.port));
  return s.port;
}

void Service::run() {
  if (impl_->port <= 0) throw StartupError("service is not bound");
  impl_->server.listen_after_bind();
}

void Service::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace stylo
