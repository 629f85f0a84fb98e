#include "stylo/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "stylo/digest.hpp"
#include "stylo/error.hpp"
#include "stylo/text.hpp"
#include "stylo/unicode.hpp"

namespace fs = std::filesystem;

namespace stylo {
namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_text_file(const fs::directory_entry& e) {
  return e.is_regular_file() && e.path().extension() == ".txt";
}

std::vector<fs::path> sorted_entries(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (is_text_file(e)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, AuthorMetadata> read_manifest(const fs::path& path) {
  std::map<std::string, AuthorMetadata> meta;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest " + path.string() + ": " + e.what());
  }
  if (!j.contains("authors")) return meta;
  for (const auto& [id, entry] : j.at("authors").items()) {
    AuthorMetadata m;
    if (entry.contains("gender")) m.gender = entry.at("gender").get<std::string>();
    if (entry.contains("age_bracket")) m.age_bracket = entry.at("age_bracket").get<std::string>();
    else if (entry.contains("age")) m.age_bracket = entry.at("age").get<std::string>();
    meta.emplace(id, std::move(m));
  }
  return meta;
}

bool document_less(const Document& a, const Document& b) {
  if (a.author_id != b.author_id) return a.author_id < b.author_id;
  if (a.role != b.role) return a.role < b.role;
  if (a.strategy != b.strategy) return a.strategy < b.strategy;
  return a.source < b.source;
}

long round_mean(double sum, std::size_t n) { return n == 0 ? 0 : std::lround(sum / static_cast<double>(n)); }

}  // namespace

std::string_view to_string(Role role) { return role == Role::background ? "background" : "task"; }

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::none: return "none";
    case Strategy::control: return "control";
    case Strategy::obfuscation: return "obfuscation";
    case Strategy::imitation: return "imitation";
    case Strategy::rtt_de: return "rtt_de";
    case Strategy::rtt_ja: return "rtt_ja";
    case Strategy::rtt_de_ja: return "rtt_de_ja";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::none, Strategy::control, Strategy::obfuscation, Strategy::imitation,
                     Strategy::rtt_de, Strategy::rtt_ja, Strategy::rtt_de_ja})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

Document Document::make(std::string author_id, std::string text, Role role, Strategy strategy,
                        std::string source) {
  if (role == Role::background && strategy != Strategy::none)
    throw InvalidArgument("background document cannot carry a strategy");
  if (role == Role::task && strategy == Strategy::none) throw InvalidArgument("task document needs a strategy");
  Document d;
  d.author_id = std::move(author_id);
  d.text = unicode::nfc(unicode::normalize_newlines(text));
  d.role = role;
  d.strategy = strategy;
  d.word_count = unicode::count_words(d.text);
  d.source = std::move(source);
  return d;
}

Corpus::Corpus(std::vector<Document> documents, std::map<std::string, AuthorMetadata> metadata)
    : documents_(std::move(documents)), metadata_(std::move(metadata)) {
  std::stable_sort(documents_.begin(), documents_.end(), document_less);
  std::set<std::string> authors;
  std::set<std::string> with_background;
  std::set<std::pair<std::string, Strategy>> tasks;
  std::vector<std::string> duplicates;
  for (const auto& d : documents_) {
    authors.insert(d.author_id);
    if (d.role == Role::background) {
      with_background.insert(d.author_id);
    } else if (!tasks.emplace(d.author_id, d.strategy).second) {
      duplicates.push_back(d.author_id + "/" + std::string(to_string(d.strategy)));
    }
  }
  if (!duplicates.empty()) {
    std::string msg = "more than one task document per strategy:";
    for (auto& d : duplicates) msg += " " + d;
    throw DataError(msg);
  }
  std::vector<std::string> missing;
  for (const auto& a : authors)
    if (!with_background.count(a)) missing.push_back(a);
  if (!missing.empty()) {
    std::string msg = "authors without background documents:";
    for (auto& a : missing) msg += " " + a;
    throw DataError(msg);
  }
  authors_.assign(authors.begin(), authors.end());
}

bool Corpus::has_author(std::string_view author) const {
  return std::binary_search(authors_.begin(), authors_.end(), author);
}

std::vector<const Document*> Corpus::background(std::string_view author) const {
  std::vector<const Document*> out;
  for (const auto& d : documents_)
    if (d.author_id == author && d.role == Role::background) out.push_back(&d);
  return out;
}

const Document* Corpus::task(std::string_view author, Strategy strategy) const {
  for (const auto& d : documents_)
    if (d.author_id == author && d.role == Role::task && d.strategy == strategy) return &d;
  return nullptr;
}

std::vector<std::string> Corpus::authors_with(Strategy strategy) const {
  std::vector<std::string> out;
  for (const auto& a : authors_)
    if (task(a, strategy) != nullptr) out.push_back(a);
  return out;
}

std::size_t Corpus::background_words(std::string_view author) const {
  std::size_t total = 0;
  for (const Document* d : background(author)) total += d->word_count;
  return total;
}

Corpus Corpus::with_documents(std::span<const Document> extra) const {
  std::vector<Document> docs = documents_;
  docs.insert(docs.end(), extra.begin(), extra.end());
  return Corpus(std::move(docs), metadata_);
}

std::string Corpus::digest() const {
  Sha256 h;
  h.field("stylo-corpus-v1");
  for (const auto& d : documents_) {
    h.field(d.author_id).field(to_string(d.role)).field(to_string(d.strategy)).field(d.source).field(d.text);
  }
  return h.hex();
}

Corpus load_corpus(const fs::path& root) {
  if (!fs::exists(root)) throw DataError("corpus root does not exist: " + root.string());
  if (!fs::is_directory(root)) throw DataError("corpus root is not a directory: " + root.string());

  std::vector<fs::path> author_dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) author_dirs.push_back(e.path());
  std::sort(author_dirs.begin(), author_dirs.end());
  if (author_dirs.empty()) throw DataError("no authors found in " + root.string());

  std::vector<Document> docs;
  std::vector<std::string> missing;
  for (const auto& dir : author_dirs) {
    const std::string author = dir.filename().string();
    std::size_t n_background = 0;
    if (fs::is_directory(dir / "background")) {
      for (const auto& p : sorted_entries(dir / "background")) {
        docs.push_back(Document::make(author, read_file(p), Role::background, Strategy::none,
                                      "background/" + p.filename().string()));
        ++n_background;
      }
    }
    if (n_background == 0) {
      missing.push_back(author);
      continue;
    }
    if (fs::is_directory(dir / "tasks")) {
      for (const auto& p : sorted_entries(dir / "tasks")) {
        auto strategy = parse_strategy(p.stem().string());
        if (!strategy || *strategy == Strategy::none) continue;
        docs.push_back(Document::make(author, read_file(p), Role::task, *strategy, "tasks/" + p.filename().string()));
      }
    }
  }
  if (!missing.empty()) {
    std::string msg = "authors without background documents:";
    for (auto& a : missing) msg += " " + a;
    throw DataError(msg);
  }
  std::map<std::string, AuthorMetadata> meta;
  if (fs::exists(root / "manifest.json")) meta = read_manifest(root / "manifest.json");
  return Corpus(std::move(docs), std::move(meta));
}

void write_corpus(const Corpus& corpus, const fs::path& root) {
  std::map<std::string, std::size_t> unnamed;
  for (const auto& d : corpus.documents()) {
    std::string source = d.source;
    if (source.empty())
      source = d.role == Role::background ? "background/" + std::to_string(unnamed[d.author_id]++) + ".txt"
                                          : "tasks/" + std::string(to_string(d.strategy)) + ".txt";
    const fs::path path = root / d.author_id / source;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << d.text;
    if (!out) throw DataError("cannot write " + path.string());
  }
  if (!corpus.metadata().empty()) {
    nlohmann::json authors = nlohmann::json::object();
    for (const auto& [id, m] : corpus.metadata()) {
      nlohmann::json e = nlohmann::json::object();
      if (m.gender) e["gender"] = *m.gender;
      if (m.age_bracket) e["age_bracket"] = *m.age_bracket;
      authors[id] = e;
    }
    std::ofstream out(root / "manifest.json", std::ios::trunc);
    out << nlohmann::json{{"authors", authors}}.dump(2) << '\n';
  }
}

std::vector<CorpusStatsRow> corpus_stats(const Corpus& corpus) {
  std::vector<CorpusStatsRow> rows;
  if (corpus.empty()) return rows;
  double train_sum = 0;
  for (const auto& a : corpus.authors()) train_sum += static_cast<double>(corpus.background_words(a));
  rows.push_back({"background", corpus.authors().size(), round_mean(train_sum, corpus.authors().size()), 0});
  for (Strategy s : kTaskStrategies) {
    const auto authors = corpus.authors_with(s);
    if (authors.empty()) continue;
    double train = 0, test = 0;
    for (const auto& a : authors) {
      train += static_cast<double>(corpus.background_words(a));
      test += static_cast<double>(corpus.task(a, s)->word_count);
    }
    rows.push_back({std::string(to_string(s)), authors.size(), round_mean(train, authors.size()),
                    round_mean(test, authors.size())});
  }
  return rows;
}

std::vector<TrainChunk> chunk_background(const Corpus& corpus, std::size_t target_words, const WarningSink& warn) {
  if (target_words < 250) throw InvalidArgument("chunk_background: target_words must be at least 250");
  std::vector<TrainChunk> chunks;
  for (const auto& author : corpus.authors()) {
    std::string joined;
    for (const Document* d : corpus.background(author)) {
      if (!joined.empty()) joined += "\n\n";
      joined += d->text;
    }

    // Sentence pieces as lists of words; overly long sentences are broken up.
    std::vector<std::vector<std::string_view>> pieces;
    for (const auto& span : sentence_spans(joined)) {
      auto words = unicode::split_whitespace(std::string_view(joined).substr(span.begin, span.end - span.begin));
      for (std::size_t i = 0; i < words.size(); i += target_words) {
        const std::size_t end = std::min(words.size(), i + target_words);
        pieces.emplace_back(words.begin() + static_cast<std::ptrdiff_t>(i),
                            words.begin() + static_cast<std::ptrdiff_t>(end));
      }
    }

    std::size_t total = 0;
    for (const auto& p : pieces) total += p.size();
    if (total * 2 < target_words && warn)
      warn("author " + author + " has only " + std::to_string(total) + " background words; emitting one short chunk");

    std::vector<std::string_view> current;
    std::size_t index = 0;
    auto flush = [&] {
      if (current.empty()) return;
      TrainChunk c;
      c.author_id = author;
      c.chunk_index = index++;
      c.word_count = current.size();
      for (std::size_t i = 0; i < current.size(); ++i) {
        if (i) c.text += ' ';
        c.text += current[i];
      }
      chunks.push_back(std::move(c));
      current.clear();
    };
    for (const auto& piece : pieces) {
      const std::size_t c = current.size();
      const std::size_t with = c + piece.size();
      if (c * 2 >= target_words && with > target_words) {
        const std::size_t over = with - target_words;
        const std::size_t under = target_words > c ? target_words - c : 0;
        if (over > under) flush();
      }
      current.insert(current.end(), piece.begin(), piece.end());
      if (current.size() >= target_words) flush();
    }
    flush();
  }
  return chunks;
}

}  // namespace stylo
