#include "synthetic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "stylo/resources.hpp"
#include "stylo/rng.hpp"

namespace stylo::testing {
namespace {

// Vocabulary: function words followed by common content words.
const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> vocab = [] {
    std::vector<std::string> v;
    const auto fw = resource_lines("koppel512.txt");
    v.insert(v.end(), fw.begin(), fw.begin() + 200);
    std::size_t added = 0;
    for (const auto& w : resource_lines("common_words.txt")) {
      if (added == 300) break;
      if (std::find(fw.begin(), fw.end(), w) != fw.end() || w.find('\'') != std::string::npos) continue;
      v.push_back(w);
      ++added;
    }
    return v;
  }();
  return vocab;
}

// Cumulative distribution of one style. Style 0 is the shared background.
std::vector<double> style_cdf(std::size_t style, double separation) {
  const auto& vocab = vocabulary();
  Rng base(0xba5e);
  Rng own(Rng::derive(0x5717e, {style}));
  std::vector<double> cdf(vocab.size());
  double total = 0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const double shared = -std::log(1.0 - base.uniform()) / static_cast<double>(i + 5);
    const double mine = std::pow(-std::log(1.0 - own.uniform()), 3.0) / static_cast<double>(i + 5);
    total += (1.0 - separation) * shared + separation * (style == 0 ? shared : mine);
    cdf[i] = total;
  }
  for (double& c : cdf) c /= total;
  return cdf;
}

std::string generate(const std::vector<double>& cdf, std::size_t words, Rng& rng) {
  const auto& vocab = vocabulary();
  std::string out;
  std::size_t in_sentence = 0, sentence_len = 8 + rng.below(12);
  for (std::size_t w = 0; w < words; ++w) {
    const double u = rng.uniform();
    const auto idx = static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    std::string word = vocab[std::min(idx, vocab.size() - 1)];
    if (in_sentence == 0) {
      if (!out.empty()) out += ' ';
      word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    } else {
      out += rng.below(9) == 0 ? ", " : " ";
    }
    out += word;
    if (++in_sentence == sentence_len) {
      out += rng.below(6) == 0 ? "?" : ".";
      in_sentence = 0;
      sentence_len = 8 + rng.below(12);
    }
  }
  if (in_sentence) out += '.';
  return out;
}

}  // namespace

std::vector<std::string> author_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(fmt::format("a{:02}", i));
  return ids;
}

std::string synthetic_text(std::size_t author, std::size_t words, double separation, std::uint64_t seed) {
  Rng rng(Rng::derive(seed, {author, words}));
  return generate(style_cdf(author + 1, separation), words, rng);
}

Corpus synthetic_corpus(const SyntheticOptions& o) {
  const auto ids = author_ids(o.n_authors);
  const std::size_t imitation_target = 1000;  // a style no author has
  std::vector<Document> docs;
  for (std::size_t a = 0; a < o.n_authors; ++a) {
    Rng rng(Rng::derive(o.seed, {a}));
    const auto own = style_cdf(a + 1, o.separation);
    // Two background files per author, as a corpus of several writing samples.
    const std::size_t half = o.background_words / 2;
    docs.push_back(Document::make(ids[a], generate(own, half, rng), Role::background, Strategy::none,
                                  "background/sample1.txt"));
    docs.push_back(Document::make(ids[a], generate(own, o.background_words - half, rng), Role::background,
                                  Strategy::none, "background/sample2.txt"));
    if (!o.with_tasks) continue;
    docs.push_back(Document::make(ids[a], generate(own, o.task_words, rng), Role::task, Strategy::control,
                                  "tasks/control.txt"));
    docs.push_back(Document::make(ids[a], generate(style_cdf(0, o.separation), o.task_words, rng), Role::task,
                                  Strategy::obfuscation, "tasks/obfuscation.txt"));
    docs.push_back(Document::make(ids[a], generate(style_cdf(imitation_target, o.separation), o.task_words, rng),
                                  Role::task, Strategy::imitation, "tasks/imitation.txt"));
  }
  return Corpus(std::move(docs));
}

std::vector<std::string> PlantedAttributor::attribute(std::span<const std::string> candidates, Strategy,
                                                      std::uint64_t set_seed) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    Rng rng(Rng::derive(set_seed, {i}));
    if (rng.uniform() < p_ || candidates.size() == 1) {
      out.push_back(candidates[i]);
    } else {
      out.push_back(candidates[(i + 1 + rng.below(candidates.size() - 1)) % candidates.size()]);
    }
  }
  return out;
}

double PlantedAttributor::crossval(std::span<const std::string> candidates, std::uint64_t set_seed) const {
  const auto predicted = attribute(candidates, Strategy::control, set_seed);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) correct += predicted[i] == candidates[i];
  return static_cast<double>(correct) / static_cast<double>(candidates.size());
}

std::string PlantedAttributor::digest() const { return fmt::format("planted-{:.17g}", p_); }

std::string random_feature_text(std::uint64_t seed, std::size_t items) {
  static const std::vector<std::string> words = {"the", "of", "and", "a", "to", "in", "is", "you", "that", "it",
                                                 "he", "was", "for", "on", "are", "as", "with", "his", "they",
                                                 "I", "The", "There", "THAT", "Mary", "writing", "nothing"};
  static const std::string specials = "~@#$%^&*-_=+><[]{}/\\|";
  static const std::string punct = ".,?!;:'\"";
  Rng rng(seed);
  std::string out;
  for (std::size_t i = 0; i < items; ++i) {
    if (i) out += rng.below(10) == 0 ? "\n" : " ";
    switch (rng.below(8)) {
      case 0: case 1: case 2:
        out += words[rng.below(words.size())];
        break;
      case 3: {  // random letter string
        const std::size_t len = 1 + rng.below(9);
        for (std::size_t k = 0; k < len; ++k) {
          const char c = static_cast<char>('a' + rng.below(26));
          out += rng.below(5) == 0 ? static_cast<char>(std::toupper(c)) : c;
        }
        break;
      }
      case 4:
        out += std::to_string(rng.below(100000));
        break;
      case 5:
        out += specials[rng.below(specials.size())];
        break;
      default:
        out += punct[rng.below(punct.size())];
    }
  }
  return out;
}

}  // namespace stylo::testing

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace stylo::testing {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() / fmt::format("{}-{}-{}", tag, ::getpid(), counter++);
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace stylo::testing
