#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylo/corpus.hpp"

namespace stylo {

enum class FeatureSetName : std::uint8_t { writeprints_static, koppel512 };

std::string_view to_string(FeatureSetName name);
std::optional<FeatureSetName> parse_feature_set(std::string_view name);

/// Fixed, ordered definition of a feature set.
struct FeatureSpec {
  FeatureSetName name{};
  std::size_t dimension = 0;
  std::vector<std::string> feature_names;
  /// Short SHA-256 over the data files and feature order; changes whenever
  /// the inventory does.
  std::string version;
};

/// Writeprints-static, 552 features, groups in this order (names sorted
/// within each group):
///
///   lex:     avg_word_length pct_digits pct_uppercase short_words total_chars total_words   (6)
///   letter:  a..z, case-insensitive                                                      (26)
///   digit:   0..9                                                                        (10)
///   special: ~ @ # $ % ^ & * - _ = + > < [ ] { } / \ |                                   (21)
///   bigram:  most frequent English letter bigrams, lowercased text                        (39)
///   trigram: most frequent English letter trigrams, lowercased text                       (20)
///   rich:    dis_legomena hapax_legomena over lowercased word types                       (2)
///   fw:      function-word counts over lowercased word tokens                             (403)
///   pos:     universal POS tag counts                                                    (17)
///   punct:   . , ? ! ; : ' "                                                             (8)
///
/// Character n-grams are overlapping occurrences in the lowercased text.
const FeatureSpec& writeprints_static_spec();

/// Koppel-512: raw counts of 512 function words over lowercased word tokens.
const FeatureSpec& koppel512_spec();

const FeatureSpec& feature_spec(FeatureSetName name);

struct FeatureVector {
  const FeatureSpec* spec = nullptr;
  std::vector<double> values;
};

/// Throws InvalidArgument("cannot featurize empty text") for blank input.
FeatureVector extract_writeprints_static(const Document& doc);
FeatureVector extract_writeprints_static(std::string_view text);
FeatureVector extract_koppel512(const Document& doc);
FeatureVector extract_koppel512(std::string_view text);
FeatureVector extract(FeatureSetName name, std::string_view text);

/// Overlapping character n-gram counts of a string (code-point n-grams).
std::map<std::string, std::size_t> count_char_ngrams(std::string_view text, std::size_t n);

/// Divides by the sum of elements; an all-zero vector is returned unchanged.
std::vector<double> normalize_sum(std::span<const double> values);
FeatureVector normalize_sum(const FeatureVector& v);

/// Per-column mean and population standard deviation.
class Scaler {
 public:
  Scaler() = default;
  Scaler(Eigen::VectorXd means, Eigen::VectorXd stds);

  bool fitted() const { return fitted_; }
  std::size_t dimension() const { return static_cast<std::size_t>(means_.size()); }
  const Eigen::VectorXd& means() const { return means_; }
  const Eigen::VectorXd& stds() const { return stds_; }

  /// (v - mean) / std per column; zero-variance columns map to 0.
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  Eigen::MatrixXd apply_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) const;

 private:
  Eigen::VectorXd means_;
  Eigen::VectorXd stds_;
  bool fitted_ = false;
};

/// Needs at least two rows. A column whose values are all identical gets that
/// value as its mean and a standard deviation of exactly 0.
Scaler fit_scaler(const Eigen::Ref<const Eigen::MatrixXd>& rows);
FeatureVector apply_scaler(const Scaler& scaler, const FeatureVector& v);

/// Stacks vectors as matrix rows; all must share one dimension.
Eigen::MatrixXd to_matrix(std::span<const FeatureVector> rows);

/// CSV with a header of `id` followed by the feature names.
void write_feature_csv(std::ostream& out, const FeatureSpec& spec, std::span<const std::string> row_ids,
                       std::span<const FeatureVector> rows);

}  // namespace stylo
