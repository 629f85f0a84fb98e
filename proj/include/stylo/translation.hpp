#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stylo/corpus.hpp"

namespace stylo {

/// Sequence of language codes visited by a round trip, e.g. en -> de -> en.
class Route {
 public:
  /// Throws InvalidArgument unless there are at least three hops that start
  /// and end with "en" and no two consecutive hops are equal.
  explicit Route(std::vector<std::string> hops);
  /// Accepts "en-de-en" or "en,de,en".
  static Route parse(std::string_view spec);

  const std::vector<std::string>& hops() const { return hops_; }
  std::string to_string() const;
  /// The task strategy of a built-in route, nullopt for custom routes.
  std::optional<Strategy> strategy() const;

  friend bool operator==(const Route&, const Route&) = default;

 private:
  std::vector<std::string> hops_;
};

/// en-de-en, en-ja-en, en-de-ja-en.
const std::vector<Route>& builtin_routes();
/// Route for rtt_de, rtt_ja or rtt_de_ja; InvalidArgument otherwise.
Route route_for(Strategy strategy);

using LanguagePair = std::pair<std::string, std::string>;

/// Machine translation service. Calls through translate() are serialised per
/// backend instance and spaced by the configured minimum interval.
class TranslationBackend {
 public:
  virtual ~TranslationBackend() = default;

  /// Stable identifier that goes into cache keys. Never contains credentials.
  virtual std::string id() const = 0;
  virtual std::vector<LanguagePair> capabilities() const = 0;
  bool supports(std::string_view source, std::string_view target) const;

  std::string translate(std::string_view text, std::string_view source, std::string_view target);

  void set_min_interval(std::chrono::milliseconds interval) { min_interval_ = interval; }
  /// Number of completed calls to translate().
  std::size_t calls() const;

 protected:
  virtual std::string do_translate(std::string_view text, std::string_view source, std::string_view target) = 0;

 private:
  mutable std::mutex mutex_;
  std::chrono::milliseconds min_interval_{0};
  std::optional<std::chrono::steady_clock::time_point> last_call_;
  std::size_t calls_ = 0;
};

/// Every pair among the given languages (default en, de, ja).
std::vector<LanguagePair> all_pairs(const std::vector<std::string>& languages);

/// Returns its input unchanged.
class IdentityBackend final : public TranslationBackend {
 public:
  explicit IdentityBackend(std::vector<std::string> languages = {"en", "de", "ja"});
  std::string id() const override { return "identity"; }
  std::vector<LanguagePair> capabilities() const override { return pairs_; }

 protected:
  std::string do_translate(std::string_view text, std::string_view, std::string_view) override {
    return std::string(text);
  }

 private:
  std::vector<LanguagePair> pairs_;
};

/// Reverses the order of the whitespace-delimited words on every hop,
/// joining them with single spaces.
class ReversingBackend final : public TranslationBackend {
 public:
  explicit ReversingBackend(std::vector<std::string> languages = {"en", "de", "ja"});
  std::string id() const override { return "reverse"; }
  std::vector<LanguagePair> capabilities() const override { return pairs_; }

 protected:
  std::string do_translate(std::string_view text, std::string_view, std::string_view) override;

 private:
  std::vector<LanguagePair> pairs_;
};

/// Settings for the generic HTTP adapter. The request is a POST of
/// {"text", "source", "target"} to url_template with {source} and {target}
/// substituted; the translation is read from response_field of the JSON
/// reply. The credential is read from the environment variable named by
/// key_env at call time and sent as a bearer token.
struct HttpBackendConfig {
  std::string id = "http";
  std::string url_template;
  std::string key_env = "STYLO_MT_KEY";
  std::string response_field = "text";
  std::vector<std::string> languages{"en", "de", "ja"};
  std::chrono::milliseconds min_interval{0};
  std::chrono::seconds timeout{60};
};

/// Reads a JSON config file; missing fields keep their defaults. The
/// STYLO_MT_URL environment variable overrides url_template.
HttpBackendConfig load_http_backend_config(const std::filesystem::path& path);

std::unique_ptr<TranslationBackend> make_http_backend(HttpBackendConfig config);

/// "identity", "reverse", or "http:<config.json>".
std::unique_ptr<TranslationBackend> make_backend(std::string_view spec);

/// On-disk cache of translations: one file per entry named by its digest plus
/// an index.tsv of (digest, backend, source, target, text digest). Entries are
/// written to a temporary file and renamed into place.
class TranslationCache {
 public:
  explicit TranslationCache(std::filesystem::path dir);

  static std::string key(std::string_view text, std::string_view source, std::string_view target,
                         std::string_view backend_id);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, std::string_view translation, std::string_view backend_id,
           std::string_view source, std::string_view target, std::string_view text);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
};

/// Translates text along the route. Every hop's result is looked up in and
/// stored to the cache when one is given. Throws TranslationError before any
/// backend call when a pair is unsupported, and with the hop index when the
/// backend fails.
std::string round_trip(std::string_view text, const Route& route, TranslationBackend& backend,
                       TranslationCache* cache = nullptr);

struct TranslationOutcome {
  Corpus corpus;                    // input plus one rtt document per translated control essay
  std::size_t translated = 0;
  std::vector<std::string> errors;  // "<author>: <message>" for authors that failed
};

/// Round-trips every control essay along a built-in route and adds the
/// results as task documents of the route's strategy, replacing any existing
/// ones. Failures are collected per author; the remaining authors continue.
TranslationOutcome translate_control_essays(const Corpus& corpus, const Route& route, TranslationBackend& backend,
                                            TranslationCache* cache = nullptr);

struct DiffReport {
  double length_ratio = 1.0;                 // translated words / original words
  std::vector<std::string> copied_oov_tokens;  // lowercased, sorted, unique
  bool identical = false;                    // byte equality after NFC
};

/// Compares a text with its round-trip translation. A word is out of
/// vocabulary when its lowercase form is neither a Koppel-512 word nor one of
/// the bundled 10,000 common words.
DiffReport inspect_round_trip(std::string_view original, std::string_view translated);

/// True when the lowercased word is in the inspection vocabulary.
bool in_common_vocabulary(std::string_view word);

}  // namespace stylo
