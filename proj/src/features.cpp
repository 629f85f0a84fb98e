#include "stylo/features.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "stylo/digest.hpp"
#include "stylo/error.hpp"
#include "stylo/resources.hpp"
#include "stylo/text.hpp"
#include "stylo/unicode.hpp"

namespace stylo {
namespace {

constexpr std::string_view kSpecialChars = "~@#$%^&*-_=+><[]{}/\\|";
constexpr std::string_view kPunctChars = ".,?!;:'\"";

enum class Group : std::uint8_t { lex, letter, digit, special, bigram, trigram, rich, fw, pos, punct };

struct Slot {
  Group group;
  std::string key;
};

struct WriteprintsLayout {
  FeatureSpec spec;
  std::vector<Slot> slots;
  std::unordered_map<std::string, std::size_t> fw_index;
  std::vector<std::pair<std::u32string, std::size_t>> ngram_index;  // n-gram -> slot
  std::size_t letter0 = 0, digit0 = 0, pos0 = 0;
  std::unordered_map<char32_t, std::size_t> char_index;  // special + punct chars -> slot
  std::unordered_map<std::string, std::size_t> lex_index;
  std::size_t hapax = 0, dis = 0;
};

std::vector<std::string> sorted_lines(std::string_view resource_name) {
  auto lines = resource_lines(resource_name);
  std::sort(lines.begin(), lines.end());
  if (std::adjacent_find(lines.begin(), lines.end()) != lines.end())
    throw DataError(std::string(resource_name) + ": duplicate entries");
  return lines;
}

std::string version_of(const std::vector<std::string>& names, std::initializer_list<std::string_view> files) {
  Sha256 h;
  for (auto f : files) h.field(resource(f));
  for (const auto& n : names) h.field(n);
  return h.hex().substr(0, 12);
}

const WriteprintsLayout& writeprints_layout() {
  static const WriteprintsLayout layout = [] {
    WriteprintsLayout L;
    auto add = [&](Group g, std::string key, std::string name) {
      L.slots.push_back({g, std::move(key)});
      L.spec.feature_names.push_back(std::move(name));
      return L.slots.size() - 1;
    };
    for (std::string k : {"avg_word_length", "pct_digits", "pct_uppercase", "short_words", "total_chars", "total_words"})
      L.lex_index[k] = add(Group::lex, k, "lex:" + k);
    L.letter0 = L.slots.size();
    for (char c = 'a'; c <= 'z'; ++c) add(Group::letter, std::string(1, c), std::string("letter:") + c);
    L.digit0 = L.slots.size();
    for (char c = '0'; c <= '9'; ++c) add(Group::digit, std::string(1, c), std::string("digit:") + c);
    std::string specials(kSpecialChars);
    std::sort(specials.begin(), specials.end());
    for (char c : specials) L.char_index[static_cast<char32_t>(c)] = add(Group::special, std::string(1, c), std::string("special:") + c);
    for (const auto& g : sorted_lines("char_bigrams.txt"))
      L.ngram_index.emplace_back(unicode::decode(g), add(Group::bigram, g, "bigram:" + g));
    for (const auto& g : sorted_lines("char_trigrams.txt"))
      L.ngram_index.emplace_back(unicode::decode(g), add(Group::trigram, g, "trigram:" + g));
    L.dis = add(Group::rich, "dis_legomena", "rich:dis_legomena");
    L.hapax = add(Group::rich, "hapax_legomena", "rich:hapax_legomena");
    for (const auto& w : sorted_lines("writeprints_function_words.txt")) L.fw_index[w] = add(Group::fw, w, "fw:" + w);
    L.pos0 = L.slots.size();
    for (PosTag t : kAllPosTags) add(Group::pos, std::string(to_string(t)), "pos:" + std::string(to_string(t)));
    std::string punct(kPunctChars);
    std::sort(punct.begin(), punct.end());
    for (char c : punct) L.char_index[static_cast<char32_t>(c)] = add(Group::punct, std::string(1, c), std::string("punct:") + c);

    L.spec.name = FeatureSetName::writeprints_static;
    L.spec.dimension = L.spec.feature_names.size();
    L.spec.version = version_of(L.spec.feature_names, {"char_bigrams.txt", "char_trigrams.txt",
                                                       "writeprints_function_words.txt", "pos_lexicon.tsv",
                                                       "abbreviations.txt"});
    if (L.spec.dimension != 552)
      throw DataError("writeprints-static inventory has " + std::to_string(L.spec.dimension) + " features, expected 552");
    return L;
  }();
  return layout;
}

struct KoppelLayout {
  FeatureSpec spec;
  std::unordered_map<std::string, std::size_t> index;
};

const KoppelLayout& koppel_layout() {
  static const KoppelLayout layout = [] {
    KoppelLayout L;
    for (const auto& w : sorted_lines("koppel512.txt")) {
      L.index[w] = L.spec.feature_names.size();
      L.spec.feature_names.push_back("fw:" + w);
    }
    L.spec.name = FeatureSetName::koppel512;
    L.spec.dimension = L.spec.feature_names.size();
    L.spec.version = version_of(L.spec.feature_names, {"koppel512.txt"});
    if (L.spec.dimension != 512)
      throw DataError("koppel512.txt has " + std::to_string(L.spec.dimension) + " entries, expected 512");
    return L;
  }();
  return layout;
}

void require_text(std::string_view text) {
  for (char32_t c : unicode::decode(text))
    if (!unicode::is_space(c)) return;
  throw InvalidArgument("cannot featurize empty text");
}

std::size_t count_occurrences(std::u32string_view hay, std::u32string_view needle) {
  if (needle.empty() || hay.size() < needle.size()) return 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i)
    if (hay.compare(i, needle.size(), needle) == 0) ++n;
  return n;
}

FeatureVector writeprints_from_normalized(std::string_view text) {
  require_text(text);
  const auto& L = writeprints_layout();
  FeatureVector out{&L.spec, std::vector<double>(L.spec.dimension, 0.0)};
  auto& v = out.values;

  const std::u32string cps = unicode::decode(text);
  std::u32string low(cps.size(), U'\0');
  std::size_t digits = 0, upper = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    low[i] = unicode::to_lower(c);
    if (unicode::is_upper(c)) ++upper;
    if (c >= U'0' && c <= U'9') {
      ++digits;
      v[L.digit0 + (c - U'0')] += 1;
    }
    if (low[i] >= U'a' && low[i] <= U'z') v[L.letter0 + (low[i] - U'a')] += 1;
    if (auto it = L.char_index.find(c); it != L.char_index.end()) v[it->second] += 1;
  }
  for (const auto& [gram, slot] : L.ngram_index) v[slot] = static_cast<double>(count_occurrences(low, gram));

  const auto tokens = tokenize(text);
  std::unordered_map<std::string, std::size_t> types;
  std::size_t words = 0, short_words = 0, letters_in_words = 0;
  for (const auto& t : tokens) {
    if (t.kind != TokenKind::word) continue;
    ++words;
    const std::size_t len = unicode::decode(t.surface).size();
    letters_in_words += len;
    if (len <= 3) ++short_words;
    std::string w = unicode::to_lower(t.surface);
    if (auto it = L.fw_index.find(w); it != L.fw_index.end()) v[it->second] += 1;
    ++types[std::move(w)];
  }
  for (const auto& [w, n] : types) {
    if (n == 1) v[L.hapax] += 1;
    if (n == 2) v[L.dis] += 1;
  }
  for (PosTag t : pos_tag(tokens)) v[L.pos0 + static_cast<std::size_t>(t)] += 1;

  const double chars = static_cast<double>(cps.size());
  v[L.lex_index.at("total_chars")] = chars;
  v[L.lex_index.at("total_words")] = static_cast<double>(words);
  v[L.lex_index.at("short_words")] = static_cast<double>(short_words);
  v[L.lex_index.at("avg_word_length")] = words ? static_cast<double>(letters_in_words) / static_cast<double>(words) : 0.0;
  v[L.lex_index.at("pct_digits")] = static_cast<double>(digits) / chars;
  v[L.lex_index.at("pct_uppercase")] = static_cast<double>(upper) / chars;
  return out;
}

FeatureVector koppel_from_normalized(std::string_view text) {
  require_text(text);
  const auto& L = koppel_layout();
  FeatureVector out{&L.spec, std::vector<double>(L.spec.dimension, 0.0)};
  for (const auto& t : tokenize(text)) {
    if (t.kind != TokenKind::word) continue;
    if (auto it = L.index.find(unicode::to_lower(t.surface)); it != L.index.end()) out.values[it->second] += 1;
  }
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string_view to_string(FeatureSetName name) {
  return name == FeatureSetName::writeprints_static ? "writeprints_static" : "koppel512";
}

std::optional<FeatureSetName> parse_feature_set(std::string_view name) {
  if (name == "writeprints_static" || name == "writeprints") return FeatureSetName::writeprints_static;
  if (name == "koppel512" || name == "koppel") return FeatureSetName::koppel512;
  return std::nullopt;
}

const FeatureSpec& writeprints_static_spec() { return writeprints_layout().spec; }
const FeatureSpec& koppel512_spec() { return koppel_layout().spec; }
const FeatureSpec& feature_spec(FeatureSetName name) {
  return name == FeatureSetName::writeprints_static ? writeprints_static_spec() : koppel512_spec();
}

FeatureVector extract_writeprints_static(const Document& doc) { return writeprints_from_normalized(doc.text); }
FeatureVector extract_writeprints_static(std::string_view text) {
  return writeprints_from_normalized(unicode::nfc(unicode::normalize_newlines(text)));
}
FeatureVector extract_koppel512(const Document& doc) { return koppel_from_normalized(doc.text); }
FeatureVector extract_koppel512(std::string_view text) {
  return koppel_from_normalized(unicode::nfc(unicode::normalize_newlines(text)));
}
FeatureVector extract(FeatureSetName name, std::string_view text) {
  return name == FeatureSetName::writeprints_static ? extract_writeprints_static(text) : extract_koppel512(text);
}

std::map<std::string, std::size_t> count_char_ngrams(std::string_view text, std::size_t n) {
  std::map<std::string, std::size_t> counts;
  const std::u32string cps = unicode::decode(text);
  if (n == 0) return counts;
  for (std::size_t i = 0; i + n <= cps.size(); ++i) ++counts[unicode::encode(std::u32string_view(cps).substr(i, n))];
  return counts;
}

std::vector<double> normalize_sum(std::span<const double> values) {
  double sum = 0;
  for (double x : values) sum += x;
  std::vector<double> out(values.begin(), values.end());
  if (sum == 0.0) return out;
  for (double& x : out) x /= sum;
  return out;
}

FeatureVector normalize_sum(const FeatureVector& v) { return {v.spec, normalize_sum(std::span<const double>(v.values))}; }

Scaler::Scaler(Eigen::VectorXd means, Eigen::VectorXd stds) : means_(std::move(means)), stds_(std::move(stds)), fitted_(true) {
  if (means_.size() != stds_.size()) throw InvalidArgument("scaler: means and stds differ in length");
  if ((stds_.array() < 0).any()) throw InvalidArgument("scaler: negative standard deviation");
}

Eigen::VectorXd Scaler::apply(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (!fitted_) throw InvalidArgument("scaler is not fitted");
  if (v.size() != means_.size())
    throw InvalidArgument(fmt::format("scaler: dimension mismatch ({} vs {})", v.size(), means_.size()));
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = stds_[i] > 0 ? (v[i] - means_[i]) / stds_[i] : 0.0;
  return out;
}

Eigen::MatrixXd Scaler::apply_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) const {
  if (!fitted_) throw InvalidArgument("scaler is not fitted");
  if (rows.cols() != means_.size())
    throw InvalidArgument(fmt::format("scaler: dimension mismatch ({} vs {})", rows.cols(), means_.size()));
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    if (stds_[j] > 0) out.col(j) = (rows.col(j).array() - means_[j]) / stds_[j];
    else out.col(j).setZero();
  }
  return out;
}

Scaler fit_scaler(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  if (rows.rows() < 2) throw InvalidArgument("fit_scaler: need at least 2 rows");
  const auto n = static_cast<double>(rows.rows());
  Eigen::VectorXd means(rows.cols()), stds(rows.cols());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const auto col = rows.col(j);
    if (col.minCoeff() == col.maxCoeff()) {
      means[j] = col[0];
      stds[j] = 0.0;
      continue;
    }
    const double mean = col.sum() / n;
    means[j] = mean;
    stds[j] = std::sqrt((col.array() - mean).square().sum() / n);
  }
  return Scaler(std::move(means), std::move(stds));
}

FeatureVector apply_scaler(const Scaler& scaler, const FeatureVector& v) {
  const Eigen::Map<const Eigen::VectorXd> in(v.values.data(), static_cast<Eigen::Index>(v.values.size()));
  const Eigen::VectorXd out = scaler.apply(in);
  return {v.spec, std::vector<double>(out.data(), out.data() + out.size())};
}

Eigen::MatrixXd to_matrix(std::span<const FeatureVector> rows) {
  if (rows.empty()) return {};
  const std::size_t d = rows.front().values.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].values.size() != d) throw InvalidArgument("to_matrix: rows differ in dimension");
    for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
  }
  return m;
}

void write_feature_csv(std::ostream& out, const FeatureSpec& spec, std::span<const std::string> row_ids,
                       std::span<const FeatureVector> rows) {
  if (row_ids.size() != rows.size()) throw InvalidArgument("write_feature_csv: ids and rows differ in length");
  out << "id";
  for (const auto& n : spec.feature_names) out << ',' << csv_field(n);
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << csv_field(row_ids[i]);
    for (double x : rows[i].values) out << ',' << fmt::format("{}", x);
    out << '\n';
  }
}

}  // namespace stylo
