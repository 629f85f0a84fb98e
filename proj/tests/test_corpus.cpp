#include <doctest.h>

#include <fmt/format.h>

#include "stylo/corpus.hpp"
#include "stylo/error.hpp"
#include "stylo/text.hpp"
#include "stylo/unicode.hpp"
#include "synthetic.hpp"

using namespace stylo;
using stylo::testing::TempDir;
using stylo::testing::write_text;

namespace {

std::string words(std::size_t n, const std::string& w = "word") {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + w;
  return out;
}

// Independent re-statement of the chunking rule over sentence word counts.
std::vector<std::size_t> oracle_chunk_sizes(const std::string& text, std::size_t target) {
  std::vector<std::size_t> pieces;
  for (const auto& s : split_sentences(text)) {
    std::size_t n = unicode::count_words(s);
    while (n > target) {
      pieces.push_back(target);
      n -= target;
    }
    if (n) pieces.push_back(n);
  }
  std::vector<std::size_t> sizes;
  std::size_t cur = 0;
  for (std::size_t p : pieces) {
    if (2 * cur >= target && cur + p > target) {
      const long over = static_cast<long>(cur + p) - static_cast<long>(target);
      const long under = static_cast<long>(target) - static_cast<long>(cur);
      if (over > under) {
        sizes.push_back(cur);
        cur = 0;
      }
    }
    cur += p;
    if (cur >= target) {
      sizes.push_back(cur);
      cur = 0;
    }
  }
  if (cur) sizes.push_back(cur);
  return sizes;
}

}  // namespace

TEST_CASE("document invariants") {
  const auto d = Document::make("a", "one two\r\nthree", Role::background, Strategy::none);
  CHECK(d.word_count == 3);
  CHECK(d.text == "one two\nthree");
  CHECK_THROWS_AS(Document::make("a", "x", Role::background, Strategy::control), InvalidArgument);
  CHECK_THROWS_AS(Document::make("a", "x", Role::task, Strategy::none), InvalidArgument);
  CHECK(parse_strategy("rtt_de_ja") == Strategy::rtt_de_ja);
  CHECK(to_string(Strategy::imitation) == "imitation");
  CHECK_FALSE(parse_strategy("bogus"));
}

TEST_CASE("corpus construction enforces its invariants") {
  CHECK_THROWS_AS(Corpus({Document::make("a", "x y", Role::task, Strategy::control)}), DataError);
  CHECK_THROWS_AS(Corpus({Document::make("a", "x", Role::background, Strategy::none),
                          Document::make("a", "y", Role::task, Strategy::control),
                          Document::make("a", "z", Role::task, Strategy::control)}),
                  DataError);
  const Corpus c({Document::make("b", "x", Role::background, Strategy::none),
                  Document::make("a", "y", Role::task, Strategy::control),
                  Document::make("a", "x", Role::background, Strategy::none)});
  CHECK(c.authors() == std::vector<std::string>{"a", "b"});
  CHECK(c.documents().front().role == Role::background);
  CHECK(c.task("a", Strategy::control) != nullptr);
  CHECK(c.task("b", Strategy::control) == nullptr);
  CHECK(c.authors_with(Strategy::control) == std::vector<std::string>{"a"});
}

TEST_CASE("load_corpus reads the directory layout") {
  TempDir dir;
  write_text(dir / "alice/background/1.txt", words(60));
  write_text(dir / "alice/background/2.txt", words(40));
  write_text(dir / "alice/tasks/control.txt", words(10));
  write_text(dir / "alice/tasks/obfuscation.txt", words(20));
  write_text(dir / "alice/tasks/notes.md", "ignored");
  write_text(dir / "bob/background/x.txt", words(200));
  write_text(dir / "bob/tasks/control.txt", words(30));
  write_text(dir / "bob/tasks/unknown.txt", words(30));
  write_text(dir / "carol/background/a.txt", words(300));
  write_text(dir / "manifest.json", R"({"authors": {"alice": {"gender": "f", "age": "18-25"}}})");

  const Corpus c = load_corpus(dir.path());
  CHECK(c.authors() == std::vector<std::string>{"alice", "bob", "carol"});
  CHECK(c.background_words("alice") == 100);
  CHECK(c.metadata().at("alice").age_bracket == "18-25");

  // Hand count: background over 3 authors (100 + 200 + 300) / 3; control
  // over alice and bob; obfuscation over alice alone.
  const auto stats = corpus_stats(c);
  REQUIRE(stats.size() == 3);
  CHECK(stats[0].task == "background");
  CHECK(stats[0].n_authors == 3);
  CHECK(stats[0].avg_train_words == 200);
  CHECK(stats[1].task == "control");
  CHECK(stats[1].n_authors == 2);
  CHECK(stats[1].avg_train_words == 150);
  CHECK(stats[1].avg_test_words == 20);
  CHECK(stats[2].task == "obfuscation");
  CHECK(stats[2].avg_test_words == 20);

  SUBCASE("reloading is idempotent") {
    const Corpus again = load_corpus(dir.path());
    CHECK(again.digest() == c.digest());
    REQUIRE(again.documents().size() == c.documents().size());
    for (std::size_t i = 0; i < c.documents().size(); ++i) CHECK(again.documents()[i].text == c.documents()[i].text);
  }
  SUBCASE("write_corpus round-trips") {
    TempDir out;
    write_corpus(c, out.path());
    CHECK(load_corpus(out.path()).digest() == c.digest());
  }
}

TEST_CASE("load_corpus errors") {
  TempDir dir;
  CHECK_THROWS_WITH_AS(load_corpus(dir.path()), doctest::Contains("no authors found"), DataError);
  CHECK_THROWS_AS(load_corpus(dir / "missing"), DataError);
  write_text(dir / "dave/tasks/control.txt", words(10));
  CHECK_THROWS_WITH_AS(load_corpus(dir.path()), doctest::Contains("dave"), DataError);
}

TEST_CASE("corpus_stats of a single author") {
  const Corpus c({Document::make("a", words(100), Role::background, Strategy::none)});
  const auto stats = corpus_stats(c);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].avg_train_words == 100);
}

TEST_CASE("chunking") {
  SUBCASE("exactly target words gives one chunk") {
    const Corpus c({Document::make("a", words(500) + ".", Role::background, Strategy::none)});
    const auto chunks = chunk_background(c, 500);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].word_count == 500);
  }
  SUBCASE("an 8,727-word author yields 17 or 18 chunks matching the oracle") {
    const std::string text = testing::synthetic_text(0, 8727, 0.5, 11);
    REQUIRE(unicode::count_words(text) == 8727);
    const Corpus c({Document::make("a", text, Role::background, Strategy::none)});
    const auto chunks = chunk_background(c, 500);
    CHECK(chunks.size() >= 17);
    CHECK(chunks.size() <= 18);
    const auto expected = oracle_chunk_sizes(c.documents()[0].text, 500);
    REQUIRE(chunks.size() == expected.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      CHECK(chunks[i].word_count == expected[i]);
      CHECK(chunks[i].chunk_index == i);
      if (i + 1 < chunks.size()) {
        CHECK(chunks[i].word_count >= 250);
        CHECK(chunks[i].word_count <= 750);
      }
    }
  }
  SUBCASE("no words are lost, and runs are deterministic") {
    const Corpus c = testing::synthetic_corpus({.n_authors = 3, .background_words = 2345, .seed = 4});
    const auto a = chunk_background(c, 500);
    const auto b = chunk_background(c, 500);
    REQUIRE(a.size() == b.size());
    std::map<std::string, std::size_t> total;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].text == b[i].text);
      CHECK(unicode::count_words(a[i].text) == a[i].word_count);
      total[a[i].author_id] += a[i].word_count;
    }
    for (const auto& author : c.authors()) CHECK(total[author] == c.background_words(author));
  }
  SUBCASE("a very long sentence is broken up") {
    const Corpus c({Document::make("a", words(1600), Role::background, Strategy::none)});
    const auto chunks = chunk_background(c, 500);
    CHECK(chunks.size() == 4);
    CHECK(chunks.back().word_count == 100);
  }
  SUBCASE("short authors warn") {
    const Corpus c({Document::make("a", words(100), Role::background, Strategy::none)});
    std::vector<std::string> warnings;
    const auto chunks = chunk_background(c, 500, [&](const std::string& w) { warnings.push_back(w); });
    CHECK(chunks.size() == 1);
    CHECK(warnings.size() == 1);
  }
  CHECK_THROWS_AS(chunk_background(Corpus{}, 100), InvalidArgument);
}
