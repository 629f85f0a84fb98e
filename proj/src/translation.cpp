#include "stylo/translation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "stylo/digest.hpp"
#include "stylo/error.hpp"
#include "stylo/resources.hpp"
#include "stylo/text.hpp"
#include "stylo/unicode.hpp"

namespace stylo {
namespace fs = std::filesystem;

// Route --------------------------------------------------------------------------

Route::Route(std::vector<std::string> hops) : hops_(std::move(hops)) {
  if (hops_.size() < 3) throw InvalidArgument(fmt::format("route needs at least 3 hops, got {}", hops_.size()));
  if (hops_.front() != "en" || hops_.back() != "en") throw InvalidArgument("route must start and end with \"en\"");
  for (std::size_t i = 0; i < hops_.size(); ++i) {
    if (hops_[i].empty()) throw InvalidArgument("route has an empty language code");
    if (i > 0 && hops_[i] == hops_[i - 1]) throw InvalidArgument("route repeats language " + hops_[i]);
  }
}

Route Route::parse(std::string_view spec) {
  std::vector<std::string> hops;
  std::string cur;
  for (char c : spec) {
    if (c == '-' || c == ',') {
      hops.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  hops.push_back(cur);
  return Route(std::move(hops));
}

std::string Route::to_string() const { return fmt::format("{}", fmt::join(hops_, "-")); }

std::optional<Strategy> Route::strategy() const {
  const std::string s = to_string();
  if (s == "en-de-en") return Strategy::rtt_de;
  if (s == "en-ja-en") return Strategy::rtt_ja;
  if (s == "en-de-ja-en") return Strategy::rtt_de_ja;
  return std::nullopt;
}

const std::vector<Route>& builtin_routes() {
  static const std::vector<Route> routes{Route({"en", "de", "en"}), Route({"en", "ja", "en"}),
                                         Route({"en", "de", "ja", "en"})};
  return routes;
}

Route route_for(Strategy strategy) {
  for (const auto& r : builtin_routes())
    if (r.strategy() == strategy) return r;
  throw InvalidArgument(fmt::format("strategy {} has no translation route", to_string(strategy)));
}

// Backends -----------------------------------------------------------------------

bool TranslationBackend::supports(std::string_view source, std::string_view target) const {
  for (const auto& [s, t] : capabilities())
    if (s == source && t == target) return true;
  return false;
}

std::string TranslationBackend::translate(std::string_view text, std::string_view source, std::string_view target) {
  std::lock_guard lock(mutex_);
  if (last_call_ && min_interval_.count() > 0) {
    const auto ready = *last_call_ + min_interval_;
    if (std::chrono::steady_clock::now() < ready) std::this_thread::sleep_until(ready);
  }
  std::string out;
  try {
    out = do_translate(text, source, target);
  } catch (...) {
    last_call_ = std::chrono::steady_clock::now();
    throw;
  }
  last_call_ = std::chrono::steady_clock::now();
  ++calls_;
  return out;
}

std::size_t TranslationBackend::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::vector<LanguagePair> all_pairs(const std::vector<std::string>& languages) {
  std::vector<LanguagePair> pairs;
  for (const auto& a : languages)
    for (const auto& b : languages)
      if (a != b) pairs.emplace_back(a, b);
  return pairs;
}

IdentityBackend::IdentityBackend(std::vector<std::string> languages) : pairs_(all_pairs(languages)) {}

ReversingBackend::ReversingBackend(std::vector<std::string> languages) : pairs_(all_pairs(languages)) {}

std::string ReversingBackend::do_translate(std::string_view text, std::string_view, std::string_view) {
  auto words = unicode::split_whitespace(text);
  std::reverse(words.begin(), words.end());
  return fmt::format("{}", fmt::join(words, " "));
}

std::unique_ptr<TranslationBackend> make_backend(std::string_view spec) {
  if (spec == "identity") return std::make_unique<IdentityBackend>();
  if (spec == "reverse") return std::make_unique<ReversingBackend>();
  if (spec.rfind("http:", 0) == 0) return make_http_backend(load_http_backend_config(fs::path(spec.substr(5))));
  throw InvalidArgument(fmt::format("unknown translation backend '{}' (identity, reverse, http:<config>)", spec));
}

// Cache --------------------------------------------------------------------------

TranslationCache::TranslationCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw DataError(fmt::format("cannot create cache directory {}: {}", dir_.string(), ec.message()));
}

std::string TranslationCache::key(std::string_view text, std::string_view source, std::string_view target,
                                  std::string_view backend_id) {
  Sha256 h;
  h.field("stylo-translation-v1").field(backend_id).field(source).field(target).field(text);
  return h.hex();
}

std::optional<std::string> TranslationCache::get(const std::string& key) const {
  std::shared_lock lock(mutex_);
  std::ifstream in(dir_ / (key + ".txt"), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void TranslationCache::put(const std::string& key, std::string_view translation, std::string_view backend_id,
                           std::string_view source, std::string_view target, std::string_view text) {
  static std::atomic<std::uint64_t> counter{0};
  std::unique_lock lock(mutex_);
  const fs::path final_path = dir_ / (key + ".txt");
  if (fs::exists(final_path)) return;
  const fs::path tmp = dir_ / fmt::format(".tmp-{}-{}-{}", key, std::hash<std::thread::id>{}(std::this_thread::get_id()),
                                          counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(translation.data(), static_cast<std::streamsize>(translation.size()));
    if (!out) throw DataError("cannot write cache entry " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, final_path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot store cache entry " + final_path.string());
  }
  std::ofstream index(dir_ / "index.tsv", std::ios::app);
  index << fmt::format("{}\t{}\t{}\t{}\t{}\n", key, backend_id, source, target, sha256_hex(text));
}

// Round trips --------------------------------------------------------------------

std::string round_trip(std::string_view text, const Route& route, TranslationBackend& backend,
                       TranslationCache* cache) {
  const auto& hops = route.hops();
  for (std::size_t i = 0; i + 1 < hops.size(); ++i)
    if (!backend.supports(hops[i], hops[i + 1]))
      throw TranslationError(fmt::format("backend {} does not support {}->{} (hop {} of route {})", backend.id(),
                                         hops[i], hops[i + 1], i + 1, route.to_string()));

  std::string current(text);
  for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
    const auto& src = hops[i];
    const auto& dst = hops[i + 1];
    std::string key;
    if (cache) {
      key = TranslationCache::key(current, src, dst, backend.id());
      if (auto hit = cache->get(key)) {
        current = std::move(*hit);
        continue;
      }
    }
    std::string next;
    try {
      next = backend.translate(current, src, dst);
    } catch (const std::exception& e) {
      throw TranslationError(fmt::format("hop {} ({}->{}) failed: {}", i + 1, src, dst, e.what()));
    }
    if (cache) cache->put(key, next, backend.id(), src, dst, current);
    current = std::move(next);
  }
  return current;
}

TranslationOutcome translate_control_essays(const Corpus& corpus, const Route& route, TranslationBackend& backend,
                                            TranslationCache* cache) {
  const auto strategy = route.strategy();
  if (!strategy) throw InvalidArgument("route " + route.to_string() + " is not a built-in translation route");

  TranslationOutcome outcome;
  std::vector<Document> added;
  for (const auto& author : corpus.authors_with(Strategy::control)) {
    try {
      std::string out = round_trip(corpus.task(author, Strategy::control)->text, route, backend, cache);
      if (unicode::count_words(out) == 0) throw TranslationError("empty translation");
      added.push_back(Document::make(author, std::move(out), Role::task, *strategy,
                                     fmt::format("tasks/{}.txt", to_string(*strategy))));
    } catch (const std::exception& e) {
      outcome.errors.push_back(author + ": " + e.what());
    }
  }
  outcome.translated = added.size();

  std::vector<Document> docs;
  for (const auto& d : corpus.documents())
    if (d.strategy != *strategy) docs.push_back(d);
  for (auto& d : added) docs.push_back(std::move(d));
  outcome.corpus = Corpus(std::move(docs), corpus.metadata());
  return outcome;
}

// Inspection ---------------------------------------------------------------------

namespace {

const std::unordered_set<std::string>& vocabulary() {
  static const std::unordered_set<std::string> vocab = [] {
    std::unordered_set<std::string> v;
    for (const char* name : {"koppel512.txt", "common_words.txt"})
      for (const auto& w : resource_lines(name)) v.insert(unicode::to_lower(w));
    return v;
  }();
  return vocab;
}

bool is_clitic(std::string_view w) { return w == "n't" || (!w.empty() && w.front() == '\''); }

std::set<std::string> oov_words(std::string_view text) {
  std::set<std::string> out;
  for (const auto& t : tokenize(text)) {
    if (t.kind != TokenKind::word || is_clitic(t.surface)) continue;
    std::string lower = unicode::to_lower(t.surface);
    if (!vocabulary().contains(lower)) out.insert(std::move(lower));
  }
  return out;
}

}  // namespace

bool in_common_vocabulary(std::string_view word) { return vocabulary().contains(unicode::to_lower(word)); }

DiffReport inspect_round_trip(std::string_view original, std::string_view translated) {
  if (original.empty() || translated.empty()) throw InvalidArgument("inspect_round_trip: empty text");
  DiffReport r;
  r.identical = unicode::nfc(original) == unicode::nfc(translated);
  const auto a = unicode::count_words(original);
  const auto b = unicode::count_words(translated);
  r.length_ratio = r.identical ? 1.0 : (a == 0 ? 0.0 : static_cast<double>(b) / static_cast<double>(a));
  const auto oa = oov_words(original);
  const auto ob = oov_words(translated);
  std::set_intersection(oa.begin(), oa.end(), ob.begin(), ob.end(), std::back_inserter(r.copied_oov_tokens));
  return r;
}

}  // namespace stylo
