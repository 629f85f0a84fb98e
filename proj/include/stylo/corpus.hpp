#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stylo {

enum class Role : std::uint8_t { background, task };

enum class Strategy : std::uint8_t { none, control, obfuscation, imitation, rtt_de, rtt_ja, rtt_de_ja };

inline constexpr Strategy kTaskStrategies[] = {Strategy::control, Strategy::obfuscation, Strategy::imitation,
                                               Strategy::rtt_de,  Strategy::rtt_ja,      Strategy::rtt_de_ja};

std::string_view to_string(Role role);
std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view name);

struct Document {
  std::string author_id;
  std::string text;  // NFC, LF line endings
  Role role = Role::background;
  Strategy strategy = Strategy::none;
  std::size_t word_count = 0;  // whitespace-delimited words
  std::string source;          // file name relative to the author directory

  /// Normalises text and computes word_count. Throws InvalidArgument when a
  /// background document carries a task strategy or a task has none.
  static Document make(std::string author_id, std::string text, Role role, Strategy strategy,
                       std::string source = {});
};

struct AuthorMetadata {
  std::optional<std::string> gender;
  std::optional<std::string> age_bracket;
};

/// Immutable collection of authors and their documents.
///
/// Authors are kept sorted; documents are ordered by author, then background
/// before task, then by source name. Every author has at least one background
/// document and at most one task document per strategy.
class Corpus {
 public:
  Corpus() = default;
  /// Validates the invariants above; throws DataError listing offending authors.
  Corpus(std::vector<Document> documents, std::map<std::string, AuthorMetadata> metadata = {});

  const std::vector<std::string>& authors() const { return authors_; }
  const std::vector<Document>& documents() const { return documents_; }
  const std::map<std::string, AuthorMetadata>& metadata() const { return metadata_; }
  bool empty() const { return authors_.empty(); }
  bool has_author(std::string_view author) const;

  std::vector<const Document*> background(std::string_view author) const;
  const Document* task(std::string_view author, Strategy strategy) const;
  /// Authors with a task document for the strategy, sorted.
  std::vector<std::string> authors_with(Strategy strategy) const;
  std::size_t background_words(std::string_view author) const;

  /// New corpus with the extra documents appended (re-validated).
  Corpus with_documents(std::span<const Document> extra) const;

  /// SHA-256 over every document's identity and text in canonical order.
  std::string digest() const;

 private:
  std::vector<std::string> authors_;
  std::vector<Document> documents_;
  std::map<std::string, AuthorMetadata> metadata_;
};

/// Loads `<root>/<author>/background/*.txt` and `<root>/<author>/tasks/<strategy>.txt`.
/// An optional `<root>/manifest.json` supplies per-author gender/age strings:
/// `{"authors": {"<id>": {"gender": "...", "age": "..."}}}`.
/// Non-.txt files and unrecognised task names are ignored.
Corpus load_corpus(const std::filesystem::path& root);

/// Writes the corpus in the layout load_corpus reads, one file per document
/// at `<root>/<author>/<source>` (a generated name when source is empty), plus
/// manifest.json when metadata is present. Existing files are overwritten.
void write_corpus(const Corpus& corpus, const std::filesystem::path& root);

struct CorpusStatsRow {
  std::string task;  // "background" for the all-author row, else a strategy name
  std::size_t n_authors = 0;
  long avg_train_words = 0;
  long avg_test_words = 0;
};

/// One "background" row over all authors, then one row per task strategy
/// present, in strategy order. Averages are rounded to the nearest integer.
std::vector<CorpusStatsRow> corpus_stats(const Corpus& corpus);

struct TrainChunk {
  std::string author_id;
  std::string text;
  std::size_t chunk_index = 0;
  std::size_t word_count = 0;
};

using WarningSink = std::function<void(const std::string&)>;

/// Splits each author's concatenated background text at sentence boundaries
/// into chunks of roughly target_words words. A chunk is closed before a
/// sentence when adding it would move the chunk further from the target than
/// stopping, provided the chunk already holds at least target_words / 2
/// words. Sentences longer than target_words are broken at whitespace. Every
/// chunk except an author's last lies in [target/2, 3*target/2].
std::vector<TrainChunk> chunk_background(const Corpus& corpus, std::size_t target_words = 500,
                                         const WarningSink& warn = {});

}  // namespace stylo
