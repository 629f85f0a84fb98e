#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stylo {

enum class TokenKind : std::uint8_t { word, number, punctuation, symbol };

struct Token {
  std::string surface;
  TokenKind kind = TokenKind::word;

  friend bool operator==(const Token&, const Token&) = default;
};

std::string_view to_string(TokenKind kind);

/// Splits text into word, number, punctuation and symbol tokens.
///
/// Case is preserved. Contractions are split at the apostrophe, with negation
/// kept together ("don't" -> "do" "n't", "it's" -> "it" "'s"). Every
/// punctuation character is its own token except runs of periods ("...").
/// Hyphens and apostrophes between letters stay inside a word. Numbers are
/// digit runs with optional inner separators ("3.14", "1,000").
std::vector<Token> tokenize(std::string_view text);

struct SentenceOptions {
  /// Suppress boundaries after listed abbreviations and single-letter initials.
  bool abbreviation_guard = true;
};

/// Byte range [begin, end) of one sentence in the source text, trimmed.
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// A boundary is terminal punctuation (. ! ?), optionally followed by closing
/// quotes or brackets, then whitespace, then an optional opening quote and an
/// uppercase letter. Boundaries always fall on whitespace, so no
/// whitespace-delimited word is ever split across sentences.
std::vector<SentenceSpan> sentence_spans(std::string_view text, SentenceOptions options = {});
std::vector<std::string> split_sentences(std::string_view text, SentenceOptions options = {});

/// Universal POS tagset (17 tags), in lexicographic order.
enum class PosTag : std::uint8_t {
  ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM, PART, PRON, PROPN, PUNCT, SCONJ, SYM, VERB, X
};

inline constexpr std::size_t kPosTagCount = 17;
inline constexpr std::array<PosTag, kPosTagCount> kAllPosTags{
    PosTag::ADJ,  PosTag::ADP,  PosTag::ADV,   PosTag::AUX,   PosTag::CCONJ, PosTag::DET,
    PosTag::INTJ, PosTag::NOUN, PosTag::NUM,   PosTag::PART,  PosTag::PRON,  PosTag::PROPN,
    PosTag::PUNCT, PosTag::SCONJ, PosTag::SYM, PosTag::VERB,  PosTag::X};

std::string_view to_string(PosTag tag);
std::optional<PosTag> parse_pos_tag(std::string_view name);

/// Deterministic lexicon + suffix tagger. Closed-class words come from the
/// bundled lexicon; unknown words fall through capitalisation and suffix
/// rules to NOUN. Punctuation is always PUNCT, symbols SYM, numbers NUM.
std::vector<PosTag> pos_tag(std::span<const Token> tokens);

}  // namespace stylo
