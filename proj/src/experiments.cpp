#include "stylo/experiments.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "parallel.hpp"
#include "stylo/digest.hpp"
#include "stylo/error.hpp"
#include "stylo/rng.hpp"

namespace stylo {
namespace {

constexpr double kZ95 = 1.96;

// Number of k-subsets of n, saturating at max.
std::uint64_t choose_saturating(std::size_t n, std::size_t k, std::uint64_t max) {
  k = std::min(k, n - k);
  long double c = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(max)) return max;
  }
  return static_cast<std::uint64_t>(std::llround(c));
}

nlohmann::json svm_params_json(const SvmParams& p) {
  return {{"degree", p.degree}, {"cost", p.cost}, {"gamma", p.gamma}, {"coef0", p.coef0},
          {"tolerance", p.tolerance}, {"max_passes", p.max_passes}};
}

nlohmann::json logreg_params_json(const LogRegParams& p) {
  return {{"lambda", p.lambda}, {"learning_rate", p.learning_rate}, {"max_iters", p.max_iters},
          {"grad_tol", p.grad_tol}, {"history", p.history},
          {"optimizer", p.optimizer == LogRegOptimizer::lbfgs ? "lbfgs" : "gradient_descent"}};
}

std::string fixed(double x) { return fmt::format("{:.6f}", x); }

}  // namespace

std::string_view to_string(SamplingMode mode) {
  return mode == SamplingMode::with_replacement ? "with_replacement" : "distinct_sets";
}

std::optional<SamplingMode> parse_sampling_mode(std::string_view name) {
  if (name == "with_replacement") return SamplingMode::with_replacement;
  if (name == "distinct_sets") return SamplingMode::distinct_sets;
  return std::nullopt;
}

std::vector<std::vector<std::string>> sample_candidate_sets(const SamplingPlan& plan, std::size_t size) {
  if (plan.n_sets == 0) throw InvalidArgument("sampling plan needs n_sets >= 1");
  if (size == 0) throw InvalidArgument("candidate set size must be positive");
  if (size > plan.pool.size())
    throw InvalidArgument(fmt::format("candidate set size {} exceeds pool of {}", size, plan.pool.size()));
  if (plan.mode == SamplingMode::distinct_sets &&
      choose_saturating(plan.pool.size(), size, plan.n_sets) < plan.n_sets)
    throw InvalidArgument(fmt::format("only {} distinct sets of size {} exist",
                                      choose_saturating(plan.pool.size(), size, plan.n_sets), size));

  Rng rng(Rng::derive(plan.seed, {0x5e75, size}));
  std::vector<std::string> pool = plan.pool;
  std::sort(pool.begin(), pool.end());
  std::vector<std::size_t> idx(pool.size());
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::vector<std::string>> sets;
  sets.reserve(plan.n_sets);
  while (sets.size() < plan.n_sets) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < size; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    std::vector<std::size_t> pick(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(pick.begin(), pick.end());
    if (plan.mode == SamplingMode::distinct_sets && !seen.insert(pick).second) continue;
    std::vector<std::string> set;
    set.reserve(size);
    for (std::size_t p : pick) set.push_back(pool[p]);
    sets.push_back(std::move(set));
  }
  return sets;
}

std::pair<double, double> confidence_interval(std::span<const double> values) {
  if (values.size() < 2) throw InvalidArgument("confidence_interval: need at least 2 values");
  const auto n = static_cast<double>(values.size());
  double mean = 0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double half = kZ95 * std::sqrt(ss / (n - 1)) / std::sqrt(n);
  return {mean - half, mean + half};
}

std::vector<std::size_t> stratified_folds(std::span<const std::string> labels, std::uint64_t seed, std::size_t n_folds) {
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);
  std::vector<std::size_t> fold(labels.size(), 0);
  std::size_t counter = 0;
  std::uint64_t label_index = 0;
  for (auto& [label, rows] : by_label) {
    Rng rng(Rng::derive(seed, {0xf01d, label_index++}));
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t r : rows) fold[r] = counter++ % n_folds;
  }
  return fold;
}

double crossval_rows(const Eigen::Ref<const Eigen::MatrixXd>& raw_rows, std::span<const std::string> labels,
                     const AttributionConfig& config, std::uint64_t seed) {
  constexpr std::size_t kFolds = 10;
  if (labels.size() < kFolds) throw InvalidArgument("10-fold cross-validation needs at least 10 chunks");
  if (static_cast<std::size_t>(raw_rows.rows()) != labels.size())
    throw InvalidArgument("crossval: rows and labels differ in length");
  if (std::set<std::string>(labels.begin(), labels.end()).size() < 2)
    throw InvalidArgument("cross-validation needs at least 2 authors");

  const auto fold = stratified_folds(labels, seed, kFolds);
  double acc_sum = 0;
  std::size_t used = 0;
  for (std::size_t f = 0; f < kFolds; ++f) {
    std::vector<Eigen::Index> train, test;
    std::vector<std::string> train_labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (fold[i] == f) {
        test.push_back(static_cast<Eigen::Index>(i));
      } else {
        train.push_back(static_cast<Eigen::Index>(i));
        train_labels.push_back(labels[i]);
      }
    }
    if (test.empty()) continue;
    const Eigen::MatrixXd train_rows = raw_rows(train, Eigen::all);
    const TrainedModel model = fit_model(train_rows, train_labels, config);
    std::size_t correct = 0;
    for (Eigen::Index t : test) {
      const Eigen::VectorXd row = raw_rows.row(t).transpose();
      if (predict(model, std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))).label ==
          labels[static_cast<std::size_t>(t)])
        ++correct;
    }
    acc_sum += static_cast<double>(correct) / static_cast<double>(test.size());
    ++used;
  }
  return acc_sum / static_cast<double>(used);
}

Eigen::MatrixXd extract_rows(FeatureSetName set, std::span<const std::string> texts, std::size_t threads) {
  const std::size_t d = feature_spec(set).dimension;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(d));
  detail::parallel_for(texts.size(), threads, [&](std::size_t i) {
    const FeatureVector v = extract(set, texts[i]);
    for (std::size_t j = 0; j < d; ++j) rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v.values[j];
  });
  return rows;
}

double crossval_10fold(std::span<const TrainChunk> chunks, const AttributionConfig& config, std::uint64_t seed,
                       std::size_t threads) {
  if (chunks.size() < 10) throw InvalidArgument("10-fold cross-validation needs at least 10 chunks");
  std::vector<std::string> texts, labels;
  for (const auto& c : chunks) {
    texts.push_back(c.text);
    labels.push_back(c.author_id);
  }
  return crossval_rows(extract_rows(config.features, texts, threads), labels, config, seed);
}

// CorpusAttributor -----------------------------------------------------------

CorpusAttributor::CorpusAttributor(const Corpus& corpus, AttributionConfig config, std::size_t chunk_words,
                                   std::size_t threads)
    : config_(std::move(config)), corpus_digest_(corpus.digest()), chunk_words_(chunk_words) {
  const auto chunks = chunk_background(corpus, chunk_words);
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    texts.push_back(chunks[i].text);
    chunk_labels_.push_back(chunks[i].author_id);
    rows_by_author_[chunks[i].author_id].push_back(i);
  }
  chunk_rows_ = extract_rows(config_.features, texts, threads);

  std::vector<const Document*> tasks;
  for (const auto& d : corpus.documents())
    if (d.role == Role::task) tasks.push_back(&d);
  std::vector<std::vector<double>> task_values(tasks.size());
  detail::parallel_for(tasks.size(), threads, [&](std::size_t i) {
    const Document& d = *tasks[i];
    if (d.word_count == 0) return;
    task_values[i] = extract(config_.features, d.text).values;
  });
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (!task_values[i].empty()) task_rows_[{tasks[i]->author_id, tasks[i]->strategy}] = std::move(task_values[i]);
}

std::vector<std::size_t> CorpusAttributor::rows_for(std::span<const std::string> candidates) const {
  std::vector<std::size_t> rows;
  for (const auto& c : candidates) {
    auto it = rows_by_author_.find(c);
    if (it == rows_by_author_.end()) throw DataError("unknown candidate author: " + c);
    rows.insert(rows.end(), it->second.begin(), it->second.end());
  }
  return rows;
}

TrainedModel CorpusAttributor::train(std::span<const std::string> candidates) const {
  const auto rows = rows_for(candidates);
  std::vector<Eigen::Index> idx(rows.begin(), rows.end());
  std::vector<std::string> labels;
  for (std::size_t r : rows) labels.push_back(chunk_labels_[r]);
  const Eigen::MatrixXd train_rows = chunk_rows_(idx, Eigen::all);
  return fit_model(train_rows, labels, config_);
}

std::vector<std::string> CorpusAttributor::attribute(std::span<const std::string> candidates, Strategy strategy,
                                                     std::uint64_t /*set_seed*/) const {
  std::vector<const std::vector<double>*> tests;
  for (const auto& c : candidates) {
    auto it = task_rows_.find({c, strategy});
    if (it == task_rows_.end())
      throw DataError("author " + c + " has no " + std::string(to_string(strategy)) + " document");
    tests.push_back(&it->second);
  }
  if (candidates.size() == 1) return {candidates.front()};
  const TrainedModel model = train(candidates);
  std::vector<std::string> out;
  for (const auto* t : tests) out.push_back(predict(model, std::span<const double>(*t)).label);
  return out;
}

double CorpusAttributor::crossval(std::span<const std::string> candidates, std::uint64_t set_seed) const {
  const auto rows = rows_for(candidates);
  std::vector<Eigen::Index> idx(rows.begin(), rows.end());
  std::vector<std::string> labels;
  for (std::size_t r : rows) labels.push_back(chunk_labels_[r]);
  const Eigen::MatrixXd sub = chunk_rows_(idx, Eigen::all);
  return crossval_rows(sub, labels, config_, set_seed);
}

std::string CorpusAttributor::name() const {
  return fmt::format("{}+{}", to_string(config_.features), to_string(config_.kind));
}

std::string CorpusAttributor::digest() const {
  const nlohmann::json j = {{"corpus", corpus_digest_},
                            {"features", to_string(config_.features)},
                            {"feature_version", feature_spec(config_.features).version},
                            {"kind", to_string(config_.kind)},
                            {"svm", svm_params_json(config_.svm)},
                            {"logreg", logreg_params_json(config_.logreg)},
                            {"chunk_words", chunk_words_}};
  return sha256_hex(j.dump());
}

// Evaluation -------------------------------------------------------------------

double evaluate_set(const Attributor& attributor, std::span<const std::string> candidates, Strategy strategy,
                    std::uint64_t set_seed) {
  if (candidates.empty()) throw InvalidArgument("evaluate_set: empty candidate set");
  const auto predicted = attributor.attribute(candidates, strategy, set_seed);
  if (predicted.size() != candidates.size()) throw Error("attributor returned the wrong number of predictions");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (predicted[i] == candidates[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(candidates.size());
}

double evaluate_set(std::span<const std::string> candidates, const Corpus& corpus, Strategy strategy,
                    const AttributionConfig& config) {
  std::vector<Document> docs;
  for (const auto& d : corpus.documents())
    if (std::find(candidates.begin(), candidates.end(), d.author_id) != candidates.end()) docs.push_back(d);
  for (const auto& c : candidates)
    if (!corpus.has_author(c)) throw DataError("unknown candidate author: " + c);
  const Corpus sub(std::move(docs), {});
  return evaluate_set(CorpusAttributor(sub, config), candidates, strategy);
}

std::string experiment_config_digest(const SamplingPlan& plan, const Attributor& attributor,
                                     std::optional<Strategy> strategy) {
  std::vector<std::string> pool = plan.pool;
  std::sort(pool.begin(), pool.end());
  const nlohmann::json j = {{"pool", pool},
                            {"set_sizes", plan.set_sizes},
                            {"n_sets", plan.n_sets},
                            {"mode", to_string(plan.mode)},
                            {"seed", plan.seed},
                            {"strategy", strategy ? std::string(to_string(*strategy)) : std::string("cv")},
                            {"model", attributor.name()},
                            {"attributor", attributor.digest()}};
  return sha256_hex(j.dump());
}

ExperimentResult run_experiment(const SamplingPlan& plan, const Attributor& attributor, std::optional<Strategy> strategy,
                                const ExperimentOptions& options) {
  if (plan.n_sets == 0) throw InvalidArgument("sampling plan needs n_sets >= 1");
  if (plan.set_sizes.empty()) throw InvalidArgument("sampling plan has no set sizes");
  ExperimentResult result;
  result.strategy = strategy ? std::string(to_string(*strategy)) : "cv";
  result.model = attributor.name();
  result.seed = plan.seed;
  result.config_digest = experiment_config_digest(plan, attributor, strategy);

  for (std::size_t size : plan.set_sizes) {
    const auto sets = sample_candidate_sets(plan, size);
    SizeResult sr;
    sr.set_size = size;
    sr.accuracies.assign(sets.size(), 0.0);
    detail::parallel_for(sets.size(), options.threads, [&](std::size_t i) {
      const std::uint64_t set_seed = Rng::derive(plan.seed, {size, i});
      try {
        sr.accuracies[i] = strategy ? evaluate_set(attributor, sets[i], *strategy, set_seed)
                                    : attributor.crossval(sets[i], set_seed);
      } catch (const std::exception& e) {
        throw DataError(fmt::format("set {} (size {}): {}", i, size, e.what()));
      }
    });
    double sum = 0;
    for (double a : sr.accuracies) sum += a;
    sr.mean_accuracy = sum / static_cast<double>(sr.accuracies.size());
    if (sr.accuracies.size() >= 2) {
      std::tie(sr.ci_low, sr.ci_high) = confidence_interval(sr.accuracies);
    } else {
      sr.ci_low = sr.ci_high = sr.mean_accuracy;
    }
    result.sizes.push_back(std::move(sr));
  }
  return result;
}

// Result files -----------------------------------------------------------------

void write_sets_csv(std::ostream& out, std::span<const ExperimentResult> results, bool header) {
  if (header) out << "strategy,model,set_size,set_index,accuracy\n";
  for (const auto& r : results)
    for (const auto& s : r.sizes)
      for (std::size_t i = 0; i < s.accuracies.size(); ++i)
        out << r.strategy << ',' << r.model << ',' << s.set_size << ',' << i << ',' << fixed(s.accuracies[i]) << '\n';
}

void write_summary_csv(std::ostream& out, std::span<const ExperimentResult> results, bool header) {
  if (header) out << "strategy,model,set_size,mean,ci_low,ci_high\n";
  for (const auto& r : results)
    for (const auto& s : r.sizes)
      out << r.strategy << ',' << r.model << ',' << s.set_size << ',' << fixed(s.mean_accuracy) << ','
          << fixed(s.ci_low) << ',' << fixed(s.ci_high) << '\n';
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::vector<SummaryRow> rows;
  std::string line;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("strategy,", 0) == 0) continue;
    }
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 6) throw DataError(fmt::format("summary CSV line {}: expected 6 fields", line_no));
    try {
      rows.push_back({f[0], f[1], static_cast<std::size_t>(std::stoul(f[2])), std::stod(f[3]), std::stod(f[4]),
                      std::stod(f[5])});
    } catch (const std::logic_error&) {
      throw DataError(fmt::format("summary CSV line {}: malformed number", line_no));
    }
  }
  return rows;
}

}  // namespace stylo
