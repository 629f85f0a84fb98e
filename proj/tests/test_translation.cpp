#include <doctest.h>

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>

#include "stylo/error.hpp"
#include "stylo/translation.hpp"
#include "stylo/unicode.hpp"
#include "synthetic.hpp"

using namespace stylo;
using testing::TempDir;

namespace {

/// Fails every call touching a given language.
class FailingBackend final : public TranslationBackend {
 public:
  explicit FailingBackend(std::string bad) : bad_(std::move(bad)) {}
  std::string id() const override { return "failing"; }
  std::vector<LanguagePair> capabilities() const override { return all_pairs({"en", "de", "ja"}); }

 protected:
  std::string do_translate(std::string_view text, std::string_view, std::string_view target) override {
    if (target == bad_) throw std::runtime_error("service unavailable");
    return std::string(text);
  }

 private:
  std::string bad_;
};

/// Fails whenever the text mentions a marker word.
class PickyBackend final : public TranslationBackend {
 public:
  std::string id() const override { return "picky"; }
  std::vector<LanguagePair> capabilities() const override { return all_pairs({"en", "de", "ja"}); }

 protected:
  std::string do_translate(std::string_view text, std::string_view, std::string_view) override {
    if (text.find("poison") != std::string_view::npos) throw std::runtime_error("rejected");
    return std::string(text);
  }
};

}  // namespace

TEST_CASE("routes") {
  CHECK(builtin_routes().size() == 3);
  CHECK(route_for(Strategy::rtt_de_ja).to_string() == "en-de-ja-en");
  CHECK(Route::parse("en,ja,en") == route_for(Strategy::rtt_ja));
  CHECK(Route::parse("en-de-en").strategy() == Strategy::rtt_de);
  CHECK_FALSE(Route::parse("en-ja-de-en").strategy());
  CHECK_THROWS_AS(Route({"en"}), InvalidArgument);
  CHECK_THROWS_AS(Route({"en", "en", "en"}), InvalidArgument);
  CHECK_THROWS_AS(Route({"de", "en", "de"}), InvalidArgument);
  CHECK_THROWS_AS(route_for(Strategy::control), InvalidArgument);
}

TEST_CASE("identity and reversing round trips") {
  const std::string text = "The quick brown fox jumps over the lazy dog. It was not amused.";
  IdentityBackend identity;
  for (const auto& route : builtin_routes()) CHECK(round_trip(text, route, identity) == text);
  CHECK(identity.calls() == 2 + 2 + 3);

  ReversingBackend reverse;
  // An even number of hops restores the word order.
  CHECK(round_trip(text, route_for(Strategy::rtt_de), reverse) ==
        "The quick brown fox jumps over the lazy dog. It was not amused.");
  CHECK(round_trip("a b c", route_for(Strategy::rtt_de_ja), reverse) == "c b a");
}

TEST_CASE("unsupported pairs fail before any backend call") {
  IdentityBackend en_de({"en", "de"});
  CHECK(en_de.supports("en", "de"));
  CHECK_FALSE(en_de.supports("en", "ja"));
  CHECK_THROWS_WITH_AS(round_trip("hello", route_for(Strategy::rtt_de_ja), en_de), doctest::Contains("de->ja"),
                       TranslationError);
  CHECK(en_de.calls() == 0);
}

TEST_CASE("backend failures name the hop") {
  FailingBackend backend("ja");
  CHECK_THROWS_WITH_AS(round_trip("hello", route_for(Strategy::rtt_de_ja), backend),
                       doctest::Contains("hop 2 (de->ja)"), TranslationError);
}

TEST_CASE("cache avoids repeat calls") {
  TempDir dir;
  TranslationCache cache(dir / "cache");
  const std::string text = "Nothing in the cache yet.";
  IdentityBackend first;
  CHECK(round_trip(text, route_for(Strategy::rtt_de_ja), first, &cache) == text);
  CHECK(first.calls() == 3);
  IdentityBackend second;
  CHECK(round_trip(text, route_for(Strategy::rtt_de_ja), second, &cache) == text);
  CHECK(second.calls() == 0);
  CHECK(std::filesystem::exists(dir / "cache/index.tsv"));

  // Keys separate backends, directions and texts.
  const auto k = TranslationCache::key("x", "en", "de", "identity");
  CHECK(k != TranslationCache::key("x", "de", "en", "identity"));
  CHECK(k != TranslationCache::key("x", "en", "de", "reverse"));
  CHECK(k != TranslationCache::key("y", "en", "de", "identity"));
  CHECK_FALSE(cache.get(TranslationCache::key("unseen", "en", "de", "identity")));

  // A different backend id does not reuse another backend's entries.
  ReversingBackend reverse;
  round_trip(text, route_for(Strategy::rtt_de_ja), reverse, &cache);
  CHECK(reverse.calls() == 3);
}

TEST_CASE("translate_control_essays") {
  const Corpus corpus = testing::synthetic_corpus({.n_authors = 3, .background_words = 600});
  IdentityBackend backend;
  const auto out = translate_control_essays(corpus, route_for(Strategy::rtt_ja), backend);
  CHECK(out.translated == 3);
  CHECK(out.errors.empty());
  CHECK(out.corpus.authors_with(Strategy::rtt_ja) == corpus.authors());
  for (const auto& author : corpus.authors())
    CHECK(out.corpus.task(author, Strategy::rtt_ja)->text == corpus.task(author, Strategy::control)->text);
  CHECK(out.corpus.task("a00", Strategy::rtt_ja)->source == "tasks/rtt_ja.txt");

  SUBCASE("rerunning replaces the previous translation") {
    ReversingBackend reverse;
    const auto again = translate_control_essays(out.corpus, route_for(Strategy::rtt_ja), reverse);
    CHECK(again.corpus.documents().size() == out.corpus.documents().size());
  }
  SUBCASE("no control essays, nothing to add") {
    const Corpus bare = testing::synthetic_corpus({.n_authors = 2, .background_words = 300, .with_tasks = false});
    const auto r = translate_control_essays(bare, route_for(Strategy::rtt_de), backend);
    CHECK(r.translated == 0);
    CHECK(r.corpus.documents().size() == bare.documents().size());
  }
  SUBCASE("one author's failure does not stop the others") {
    std::vector<Document> docs(corpus.documents().begin(), corpus.documents().end());
    for (auto& d : docs)
      if (d.author_id == "a01" && d.strategy == Strategy::control) d = Document::make("a01", "poison pill", Role::task, Strategy::control);
    PickyBackend picky;
    const auto r = translate_control_essays(Corpus(std::move(docs)), route_for(Strategy::rtt_de), picky);
    CHECK(r.translated == 2);
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].starts_with("a01: "));
    CHECK(r.corpus.task("a01", Strategy::rtt_de) == nullptr);
  }
  CHECK_THROWS_AS(translate_control_essays(corpus, Route::parse("en-ja-de-en"), backend), InvalidArgument);
}

TEST_CASE("round-trip inspection") {
  const std::string text = "I was optomistic about the zorblax, said Kowalski.";
  const auto same = inspect_round_trip(text, text);
  CHECK(same.identical);
  CHECK(same.length_ratio == 1.0);
  CHECK(same.copied_oov_tokens == std::vector<std::string>{"kowalski", "optomistic", "zorblax"});

  const auto changed = inspect_round_trip(text, "I was optomistic about it.");
  CHECK_FALSE(changed.identical);
  CHECK(changed.length_ratio == doctest::Approx(5.0 / 8.0));
  CHECK(changed.copied_oov_tokens == std::vector<std::string>{"optomistic"});

  CHECK(inspect_round_trip("the cat sat on the mat", "the cat sat on the mat").copied_oov_tokens.empty());
  CHECK(in_common_vocabulary("The"));
  CHECK_FALSE(in_common_vocabulary("zorblax"));

  // NFC-equivalent spellings count as identical, in either order.
  const std::string composed = "caf\xC3\xA9";
  const std::string decomposed = "cafe\xCC\x81";
  CHECK(inspect_round_trip(composed, decomposed).identical);
  CHECK(inspect_round_trip(decomposed, composed).identical);
  CHECK(inspect_round_trip(composed, decomposed).copied_oov_tokens ==
        inspect_round_trip(decomposed, composed).copied_oov_tokens);
}

TEST_CASE("backend factory") {
  CHECK(make_backend("identity")->id() == "identity");
  CHECK(make_backend("reverse")->id() == "reverse");
  CHECK_THROWS_AS(make_backend("nonsense"), InvalidArgument);

  TempDir dir;
  testing::write_text(dir / "mt.json",
                      R"({"id": "acme", "url_template": "http://127.0.0.1:1/{source}/{target}", "languages": ["en", "de"]})");
  const auto cfg = load_http_backend_config(dir / "mt.json");
  CHECK(cfg.id == "acme");
  CHECK(cfg.key_env == "STYLO_MT_KEY");
  auto http = make_backend("http:" + (dir / "mt.json").string());
  CHECK(http->id() == "acme");
  CHECK(http->supports("de", "en"));
  CHECK_FALSE(http->supports("en", "ja"));
  // Nothing listens on port 1: the failure surfaces as a TranslationError.
  CHECK_THROWS_AS(round_trip("hello", route_for(Strategy::rtt_de), *http), TranslationError);
}
