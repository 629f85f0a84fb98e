#include <doctest.h>

#include <fmt/format.h>

#include "stylo/rng.hpp"
#include "stylo/text.hpp"
#include "stylo/unicode.hpp"
#include "synthetic.hpp"

using namespace stylo;

namespace {

std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

std::size_t count_kind(const std::vector<Token>& tokens, TokenKind kind) {
  std::size_t n = 0;
  for (const auto& t : tokens) n += t.kind == kind;
  return n;
}

}  // namespace

TEST_CASE("unicode helpers") {
  CHECK(unicode::nfc("e\xCC\x81") == "\xC3\xA9");
  CHECK(unicode::normalize_newlines("a\r\nb\rc") == "a\nb\nc");
  CHECK(unicode::count_words("  one\ttwo  three\n") == 3);
  CHECK(unicode::count_words("") == 0);
  CHECK(unicode::to_lower("\xC3\x89T\xC3\x89") == "\xC3\xA9t\xC3\xA9");
  CHECK(unicode::decode("\xff") == std::u32string(1, U'�'));
}

TEST_CASE("tokenize examples") {
  CHECK(tokenize("").empty());

  const auto t = tokenize("It is a really perfect place to live.");
  CHECK(count_kind(t, TokenKind::word) == 8);
  CHECK(count_kind(t, TokenKind::punctuation) == 1);
  CHECK(t.size() == 9);

  CHECK(surfaces(tokenize("don't")) == std::vector<std::string>{"do", "n't"});
  CHECK(surfaces(tokenize("it's")) == std::vector<std::string>{"it", "'s"});
  CHECK(surfaces(tokenize("We'll see")) == std::vector<std::string>{"We", "'ll", "see"});
  CHECK(surfaces(tokenize("Wait... what?!")) == std::vector<std::string>{"Wait", "...", "what", "?", "!"});
  CHECK(surfaces(tokenize("well-known $3.14 1,000")) ==
        std::vector<std::string>{"well-known", "$", "3.14", "1,000"});
  CHECK(tokenize("3.14")[0].kind == TokenKind::number);
  CHECK(tokenize("$")[0].kind == TokenKind::symbol);
  // Case is preserved.
  CHECK(tokenize("HeLLo")[0].surface == "HeLLo");
}

TEST_CASE("tokenize is stable when surfaces are rejoined with spaces") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::string text = seed % 2 ? testing::random_feature_text(seed, 80)
                                      : testing::synthetic_text(seed % 5, 120, 0.5, seed) +
                                            " I don't think it's what we'd've said... (really?) \"yes\" - 3.5%";
    const auto first = tokenize(text);
    std::string joined;
    for (const auto& tok : first) joined += (joined.empty() ? "" : " ") + tok.surface;
    CAPTURE(text);
    CHECK(tokenize(joined) == first);
  }
}

TEST_CASE("sentence splitting") {
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("A. B.", {.abbreviation_guard = false}).size() == 2);
  CHECK(split_sentences("A. B.").size() == 1);  // single-letter initial

  const std::string fixture =
      "Mr. Smith went to Washington on Monday. He met Dr. Jones at 10 a.m. and they talked! "
      "\"Was it worth it?\" she asked.";
  const auto s = split_sentences(fixture);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == "Mr. Smith went to Washington on Monday.");
  CHECK(s[1] == "He met Dr. Jones at 10 a.m. and they talked!");
  CHECK(s[2] == "\"Was it worth it?\" she asked.");

  // No split before a lowercase word or inside a number.
  CHECK(split_sentences("It cost 3.50 dollars. then it rose.").size() == 1);
}

TEST_CASE("sentence boundaries never split a word") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::string text = testing::synthetic_text(seed % 3, 400, 0.7, seed);
    std::size_t words = 0;
    for (const auto& s : split_sentences(text)) words += unicode::count_words(s);
    CHECK(words == unicode::count_words(text));
  }
}

TEST_CASE("pos tagging") {
  CHECK(pos_tag(std::vector<Token>{}).empty());
  CHECK(pos_tag(tokenize("the dog")) == std::vector<PosTag>{PosTag::DET, PosTag::NOUN});
  for (const char* p : {".", ",", "?", "!", ";", ":", "(", ")", "\"", "..."}) {
    CAPTURE(p);
    CHECK(pos_tag(tokenize(p)) == std::vector<PosTag>{PosTag::PUNCT});
  }
  CHECK(pos_tag(tokenize("42"))[0] == PosTag::NUM);
  const auto tags = pos_tag(tokenize("I want to go quickly to London"));
  CHECK(tags[2] == PosTag::PART);
  CHECK(tags[4] == PosTag::ADV);
  CHECK(tags[5] == PosTag::ADP);
  CHECK(tags[6] == PosTag::PROPN);
  CHECK(to_string(PosTag::CCONJ) == "CCONJ");
  CHECK(parse_pos_tag("SCONJ") == PosTag::SCONJ);
  CHECK_FALSE(parse_pos_tag("FOO"));
}

TEST_CASE("pos_tag keeps length and is pure on random token lists") {
  Rng rng(7);
  const auto pool = tokenize(testing::random_feature_text(3, 300) + " " + testing::synthetic_text(1, 300, 0.5, 3));
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Token> tokens;
    const auto n = rng.below(40);
    for (std::uint64_t i = 0; i < n; ++i) tokens.push_back(pool[rng.below(pool.size())]);
    const auto tags = pos_tag(tokens);
    CHECK(tags.size() == tokens.size());
    CHECK(pos_tag(tokens) == tags);
  }
}
