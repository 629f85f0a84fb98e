#include "stylo/text.hpp"

#include <unicode/uchar.h>

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "stylo/error.hpp"
#include "stylo/resources.hpp"
#include "stylo/unicode.hpp"

namespace stylo {
namespace {

using unicode::is_digit;
using unicode::is_letter;
using unicode::is_space;

bool is_mark(char32_t cp) { return (U_GET_GC_MASK(static_cast<UChar32>(cp)) & U_GC_M_MASK) != 0; }
bool is_word_char(char32_t cp) { return is_letter(cp) || is_mark(cp); }
bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == U'’'; }
bool is_hyphen(char32_t cp) { return cp == U'-' || cp == U'‐' || cp == U'‑'; }

const std::unordered_set<std::u32string>& clitics() {
  static const std::unordered_set<std::u32string> set{U"s", U"ll", U"re", U"ve", U"d", U"m"};
  return set;
}

std::u32string lower(std::u32string_view s) {
  std::u32string out(s);
  for (auto& c : out) c = unicode::to_lower(c);
  return out;
}

void push(std::vector<Token>& out, std::u32string_view cps, TokenKind kind) {
  out.push_back(Token{unicode::encode(cps), kind});
}

void emit_word(std::vector<Token>& out, std::u32string_view word) {
  const std::u32string low = lower(word);
  const std::size_t n = low.size();
  if (n > 3 && low[n - 3] == U'n' && is_apostrophe(low[n - 2]) && low[n - 1] == U't') {
    emit_word(out, word.substr(0, n - 3));
    push(out, word.substr(n - 3), TokenKind::word);
    return;
  }
  for (std::size_t p = n; p-- > 1;) {
    if (!is_apostrophe(low[p])) continue;
    if (clitics().count(low.substr(p + 1))) {
      emit_word(out, word.substr(0, p));
      push(out, word.substr(p), TokenKind::word);
      return;
    }
    break;
  }
  push(out, word, TokenKind::word);
}

bool is_terminal(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?'; }
bool is_closer(char32_t cp) {
  return cp == U'"' || cp == U'\'' || cp == U')' || cp == U']' || cp == U'’' || cp == U'”';
}
bool is_opener(char32_t cp) {
  return cp == U'"' || cp == U'\'' || cp == U'(' || cp == U'[' || cp == U'‘' || cp == U'“';
}

const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> set = [] {
    std::unordered_set<std::string> s;
    for (auto& line : resource_lines("abbreviations.txt")) s.insert(line);
    return s;
  }();
  return set;
}

const std::unordered_map<std::string, PosTag>& lexicon() {
  static const std::unordered_map<std::string, PosTag> map = [] {
    std::unordered_map<std::string, PosTag> m;
    for (auto& line : resource_lines("pos_lexicon.tsv")) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw DataError("pos_lexicon.tsv: missing tab in line: " + line);
      auto tag = parse_pos_tag(std::string_view(line).substr(tab + 1));
      if (!tag) throw DataError("pos_lexicon.tsv: unknown tag in line: " + line);
      m.emplace(line.substr(0, tab), *tag);
    }
    return m;
  }();
  return map;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

PosTag suffix_tag(std::string_view w) {
  static constexpr std::string_view kNoun[] = {"tion", "sion", "ment", "ness", "ity", "ship", "ism",
                                               "ance", "ence", "hood", "dom", "ist"};
  static constexpr std::string_view kAdj[] = {"able", "ible", "ful", "ous", "ive", "less", "ish", "ary", "ic", "al"};
  if (w.size() > 4 && ends_with(w, "ly")) return PosTag::ADV;
  if (w.size() > 4 && (ends_with(w, "ing") || ends_with(w, "ed"))) return PosTag::VERB;
  if (w.size() > 4 && (ends_with(w, "ize") || ends_with(w, "ise") || ends_with(w, "ify"))) return PosTag::VERB;
  for (auto s : kNoun)
    if (w.size() > s.size() + 2 && ends_with(w, s)) return PosTag::NOUN;
  for (auto s : kAdj)
    if (w.size() > s.size() + 2 && ends_with(w, s)) return PosTag::ADJ;
  return PosTag::NOUN;
}

bool sentence_initial(std::span<const Token> tokens, std::size_t i) {
  while (i > 0) {
    const Token& prev = tokens[i - 1];
    if (prev.kind != TokenKind::punctuation) return false;
    if (prev.surface == "." || prev.surface == "!" || prev.surface == "?" || prev.surface == "..." ||
        prev.surface == ":")
      return true;
    if (prev.surface != "\"" && prev.surface != "'" && prev.surface != "(" && prev.surface != "“")
      return false;
    --i;
  }
  return true;
}

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::word: return "word";
    case TokenKind::number: return "number";
    case TokenKind::punctuation: return "punctuation";
    case TokenKind::symbol: return "symbol";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view text) {
  const std::u32string cps = unicode::decode(text);
  const std::size_t n = cps.size();
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = cps[i];
    if (is_space(c)) {
      ++i;
    } else if (is_word_char(c)) {
      std::size_t j = i + 1;
      while (j < n) {
        if (is_word_char(cps[j])) {
          ++j;
        } else if ((is_apostrophe(cps[j]) || is_hyphen(cps[j])) && j + 1 < n && is_letter(cps[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
      emit_word(out, std::u32string_view(cps).substr(i, j - i));
      i = j;
    } else if (is_digit(c)) {
      std::size_t j = i + 1;
      while (j < n) {
        if (is_digit(cps[j])) {
          ++j;
        } else if ((cps[j] == U'.' || cps[j] == U',') && j + 1 < n && is_digit(cps[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
      push(out, std::u32string_view(cps).substr(i, j - i), TokenKind::number);
      i = j;
    } else if (is_apostrophe(c)) {
      std::size_t j = i + 1;
      while (j < n && is_word_char(cps[j])) ++j;
      if (j > i + 1 && clitics().count(lower(std::u32string_view(cps).substr(i + 1, j - i - 1)))) {
        push(out, std::u32string_view(cps).substr(i, j - i), TokenKind::word);
        i = j;
      } else {
        push(out, std::u32string_view(cps).substr(i, 1), TokenKind::punctuation);
        ++i;
      }
    } else if (unicode::is_punct(c)) {
      std::size_t j = i + 1;
      if (c == U'.')
        while (j < n && cps[j] == U'.') ++j;
      push(out, std::u32string_view(cps).substr(i, j - i), TokenKind::punctuation);
      i = j;
    } else {
      push(out, std::u32string_view(cps).substr(i, 1), TokenKind::symbol);
      ++i;
    }
  }
  return out;
}

std::vector<SentenceSpan> sentence_spans(std::string_view text, SentenceOptions options) {
  const std::u32string cps = unicode::decode(text);
  const std::size_t n = cps.size();
  std::vector<std::size_t> offset(n + 1, 0);
  {
    std::string buf;
    for (std::size_t k = 0; k < n; ++k) {
      buf.clear();
      unicode::append_utf8(buf, cps[k]);
      offset[k + 1] = offset[k] + buf.size();
    }
  }
  // Invalid UTF-8 would make offsets drift from the source bytes.
  if (offset[n] != text.size()) throw InvalidArgument("sentence_spans: text is not valid UTF-8");

  std::vector<std::size_t> cuts;  // code-point index where the next sentence may start
  for (std::size_t k = 0; k < n; ++k) {
    if (!is_terminal(cps[k])) continue;
    std::size_t e = k;
    while (e + 1 < n && (is_terminal(cps[e + 1]) || is_closer(cps[e + 1]))) ++e;
    const std::size_t terminal_end = e;
    if (e + 1 >= n || !is_space(cps[e + 1])) {
      k = terminal_end;
      continue;
    }
    std::size_t w = e + 1;
    while (w < n && is_space(cps[w])) ++w;
    std::size_t m = w;
    while (m < n && is_opener(cps[m])) ++m;
    if (m >= n || !unicode::is_upper(cps[m])) {
      k = terminal_end;
      continue;
    }
    if (options.abbreviation_guard && cps[k] == U'.' && (k + 1 >= n || !is_terminal(cps[k + 1]))) {
      std::size_t b = k;
      while (b > 0 && !is_space(cps[b - 1])) --b;
      while (b < k && is_opener(cps[b])) ++b;
      const std::u32string word = lower(std::u32string_view(cps).substr(b, k - b));
      const bool initial = word.size() == 1 && is_letter(word[0]);
      if (initial || abbreviations().count(unicode::encode(word))) {
        k = terminal_end;
        continue;
      }
    }
    cuts.push_back(e + 1);
    k = terminal_end;
  }
  cuts.push_back(n);

  std::vector<SentenceSpan> spans;
  std::size_t start = 0;
  for (std::size_t cut : cuts) {
    std::size_t b = start, e = cut;
    while (b < e && is_space(cps[b])) ++b;
    while (e > b && is_space(cps[e - 1])) --e;
    if (e > b) spans.push_back({offset[b], offset[e]});
    start = cut;
  }
  return spans;
}

std::vector<std::string> split_sentences(std::string_view text, SentenceOptions options) {
  std::vector<std::string> out;
  for (const auto& span : sentence_spans(text, options))
    out.emplace_back(text.substr(span.begin, span.end - span.begin));
  return out;
}

std::string_view to_string(PosTag tag) {
  static constexpr std::array<std::string_view, kPosTagCount> kNames{
      "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
      "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};
  return kNames[static_cast<std::size_t>(tag)];
}

std::optional<PosTag> parse_pos_tag(std::string_view name) {
  for (PosTag t : kAllPosTags)
    if (to_string(t) == name) return t;
  return std::nullopt;
}

std::vector<PosTag> pos_tag(std::span<const Token> tokens) {
  const auto& lex = lexicon();
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& tok = tokens[i];
    switch (tok.kind) {
      case TokenKind::punctuation: tags.push_back(PosTag::PUNCT); continue;
      case TokenKind::symbol: tags.push_back(PosTag::SYM); continue;
      case TokenKind::number: tags.push_back(PosTag::NUM); continue;
      case TokenKind::word: break;
    }
    const std::string low = unicode::to_lower(tok.surface);
    if (low == "to") {
      PosTag tag = PosTag::ADP;
      if (i + 1 < tokens.size() && tokens[i + 1].kind == TokenKind::word) {
        auto next = lex.find(unicode::to_lower(tokens[i + 1].surface));
        if (next != lex.end() && (next->second == PosTag::VERB || next->second == PosTag::AUX)) tag = PosTag::PART;
      }
      tags.push_back(tag);
      continue;
    }
    if (auto it = lex.find(low); it != lex.end()) {
      tags.push_back(it->second);
      continue;
    }
    const std::u32string cps = unicode::decode(tok.surface);
    const bool latin = std::any_of(cps.begin(), cps.end(), [](char32_t c) { return c < 0x250 && is_letter(c); });
    if (!latin) {
      tags.push_back(PosTag::X);
      continue;
    }
    if (unicode::is_upper(cps.front()) && !sentence_initial(tokens, i)) {
      tags.push_back(PosTag::PROPN);
      continue;
    }
    tags.push_back(suffix_tag(low));
  }
  return tags;
}

}  // namespace stylo
