#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stylo/corpus.hpp"
#include "stylo/learners.hpp"

namespace stylo {

enum class SamplingMode : std::uint8_t { with_replacement, distinct_sets };

std::string_view to_string(SamplingMode mode);
std::optional<SamplingMode> parse_sampling_mode(std::string_view name);

struct SamplingPlan {
  std::vector<std::string> pool;
  std::vector<std::size_t> set_sizes{5, 10, 15, 20, 25, 30, 35, 40};
  std::size_t n_sets = 1000;
  SamplingMode mode = SamplingMode::with_replacement;
  std::uint64_t seed = 0;
};

/// n_sets candidate sets of `size` distinct authors drawn uniformly from the
/// pool; each set is returned sorted. In with_replacement mode the same set
/// may appear more than once; distinct_sets mode forbids repeats. The stream
/// depends only on (seed, size).
std::vector<std::vector<std::string>> sample_candidate_sets(const SamplingPlan& plan, std::size_t size);

/// Normal-approximation 95% interval: mean -/+ 1.96 * s / sqrt(n) with the
/// sample standard deviation s. Needs at least two values.
std::pair<double, double> confidence_interval(std::span<const double> values);

/// Ten stratified folds: each author's rows are shuffled with the seed and
/// dealt round-robin, continuing the fold counter across authors in sorted
/// order. Returns the fold index of every row.
std::vector<std::size_t> stratified_folds(std::span<const std::string> labels, std::uint64_t seed,
                                          std::size_t n_folds = 10);

/// Mean held-out accuracy over ten stratified folds of raw feature rows; the
/// normaliser and scaler are refit on every training fold.
double crossval_rows(const Eigen::Ref<const Eigen::MatrixXd>& raw_rows, std::span<const std::string> labels,
                     const AttributionConfig& config, std::uint64_t seed = 0);
/// Extracts the configured features from the chunks, then crossval_rows.
double crossval_10fold(std::span<const TrainChunk> chunks, const AttributionConfig& config, std::uint64_t seed = 0,
                       std::size_t threads = 0);

/// Extracts features for many texts in parallel (threads = 0: hardware concurrency).
Eigen::MatrixXd extract_rows(FeatureSetName set, std::span<const std::string> texts, std::size_t threads = 0);

/// Trains on a candidate pool and attributes that pool's test documents.
class Attributor {
 public:
  virtual ~Attributor() = default;
  /// Predicted author of each candidate's document for the strategy, in
  /// candidate order. Throws DataError naming a candidate without one.
  virtual std::vector<std::string> attribute(std::span<const std::string> candidates, Strategy strategy,
                                             std::uint64_t set_seed) const = 0;
  /// Cross-validated accuracy on the candidates' training chunks.
  virtual double crossval(std::span<const std::string> candidates, std::uint64_t set_seed) const = 0;
  /// Name written to result files.
  virtual std::string name() const = 0;
  /// Digest of everything that determines this attributor's outputs.
  virtual std::string digest() const = 0;
};

/// Attributor backed by a corpus whose chunk and task features are extracted
/// once up front.
class CorpusAttributor final : public Attributor {
 public:
  CorpusAttributor(const Corpus& corpus, AttributionConfig config, std::size_t chunk_words = 500,
                   std::size_t threads = 0);

  std::vector<std::string> attribute(std::span<const std::string> candidates, Strategy strategy,
                                     std::uint64_t set_seed) const override;
  double crossval(std::span<const std::string> candidates, std::uint64_t set_seed) const override;
  std::string name() const override;
  std::string digest() const override;

  const AttributionConfig& config() const { return config_; }
  /// Trains on the candidates' chunks.
  TrainedModel train(std::span<const std::string> candidates) const;

 private:
  std::vector<std::size_t> rows_for(std::span<const std::string> candidates) const;

  AttributionConfig config_;
  std::string corpus_digest_;
  std::size_t chunk_words_;
  Eigen::MatrixXd chunk_rows_;
  std::vector<std::string> chunk_labels_;
  std::map<std::string, std::vector<std::size_t>> rows_by_author_;
  std::map<std::pair<std::string, Strategy>, std::vector<double>> task_rows_;
};

/// Fraction of candidates whose document is attributed to them. A single
/// candidate is trivially correct and no model is trained.
double evaluate_set(const Attributor& attributor, std::span<const std::string> candidates, Strategy strategy,
                    std::uint64_t set_seed = 0);
double evaluate_set(std::span<const std::string> candidates, const Corpus& corpus, Strategy strategy,
                    const AttributionConfig& config);

struct SizeResult {
  std::size_t set_size = 0;
  double mean_accuracy = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> accuracies;  // by set index
};

struct ExperimentResult {
  std::string strategy;  // strategy name, or "cv" for the cross-validation baseline
  std::string model;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<SizeResult> sizes;
};

struct ExperimentOptions {
  std::size_t threads = 0;
};

/// Evaluates every sampled set at every size and aggregates mean and 95% CI.
/// `strategy` empty selects the cross-validation baseline on each set.
/// Results are ordered by set index and independent of thread scheduling.
/// With n_sets == 1 the interval collapses to the single value.
ExperimentResult run_experiment(const SamplingPlan& plan, const Attributor& attributor,
                                std::optional<Strategy> strategy, const ExperimentOptions& options = {});

/// SHA-256 over the plan, strategy and attributor digest.
std::string experiment_config_digest(const SamplingPlan& plan, const Attributor& attributor,
                                     std::optional<Strategy> strategy);

// Result files ---------------------------------------------------------------

/// Header: strategy,model,set_size,set_index,accuracy
void write_sets_csv(std::ostream& out, std::span<const ExperimentResult> results, bool header = true);
/// Header: strategy,model,set_size,mean,ci_low,ci_high
void write_summary_csv(std::ostream& out, std::span<const ExperimentResult> results, bool header = true);

struct SummaryRow {
  std::string strategy;
  std::string model;
  std::size_t set_size = 0;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};
std::vector<SummaryRow> read_summary_csv(std::istream& in);

}  // namespace stylo
