#include <httplib.h>

#include <fmt/format.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>

#include "stylo/error.hpp"
#include "stylo/translation.hpp"

namespace stylo {
namespace {

std::string substitute(std::string s, std::string_view name, std::string_view value) {
  const std::string token = fmt::format("{{{}}}", name);
  for (std::size_t pos = s.find(token); pos != std::string::npos; pos = s.find(token, pos + value.size()))
    s.replace(pos, token.size(), value);
  return s;
}

// Splits "https://host:port/path?q" into scheme+authority and path+query.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InvalidArgument("translation URL lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpBackend final : public TranslationBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)), pairs_(all_pairs(config_.languages)) {
    if (config_.url_template.empty()) throw InvalidArgument("HTTP translation backend needs url_template");
    set_min_interval(config_.min_interval);
  }

  std::string id() const override { return config_.id; }
  std::vector<LanguagePair> capabilities() const override { return pairs_; }

 protected:
  std::string do_translate(std::string_view text, std::string_view source, std::string_view target) override {
    const std::string url = substitute(substitute(config_.url_template, "source", source), "target", target);
    const auto [base, path] = split_url(url);
    httplib::Client client(base);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);
    const nlohmann::json body = {{"text", text}, {"source", source}, {"target", target}};
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) throw TranslationError(fmt::format("request failed: {}", httplib::to_string(res.error())));
    if (res->status != 200) throw TranslationError(fmt::format("service returned HTTP {}", res->status));
    const auto reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains(config_.response_field) || !reply[config_.response_field].is_string())
      throw TranslationError("service reply lacks string field '" + config_.response_field + "'");
    return reply[config_.response_field].get<std::string>();
  }

 private:
  HttpBackendConfig config_;
  std::vector<LanguagePair> pairs_;
};

}  // namespace

HttpBackendConfig load_http_backend_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open backend config " + path.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("backend config is not a JSON object: " + path.string());
  HttpBackendConfig c;
  c.id = j.value("id", c.id);
  c.url_template = j.value("url_template", c.url_template);
  c.key_env = j.value("key_env", c.key_env);
  c.response_field = j.value("response_field", c.response_field);
  c.languages = j.value("languages", c.languages);
  c.min_interval = std::chrono::milliseconds(j.value("min_interval_ms", 0));
  c.timeout = std::chrono::seconds(j.value("timeout_s", 60));
  if (const char* url = std::getenv("STYLO_MT_URL"); url && *url) c.url_template = url;
  return c;
}

std::unique_ptr<TranslationBackend> make_http_backend(HttpBackendConfig config) {
  return std::make_unique<HttpBackend>(std::move(config));
}

}  // namespace stylo
