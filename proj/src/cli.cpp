#include "stylo/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stylo/charts.hpp"
#include "stylo/corpus.hpp"
#include "stylo/digest.hpp"
#include "stylo/error.hpp"
#include "stylo/experiments.hpp"
#include "stylo/features.hpp"
#include "stylo/learners.hpp"
#include "stylo/service.hpp"
#include "stylo/translation.hpp"

#ifndef STYLO_VERSION
#define STYLO_VERSION "0.0.0"
#endif

namespace stylo {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("cannot write " + path.string());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

/// Run record written next to the outputs. It holds no timestamps so that
/// identical runs produce identical manifests.
class Manifest {
 public:
  Manifest(std::string command, std::span<const std::string> args)
      : j_{{"tool", "stylo"}, {"version", STYLO_VERSION}, {"command", std::move(command)},
           {"args", std::vector<std::string>(args.begin(), args.end())}} {}

  json& operator[](const char* key) { return j_[key]; }

  void corpus(const fs::path& root, const Corpus& c) {
    j_["corpus"] = {{"path", root.string()}, {"digest", c.digest()}, {"authors", c.authors().size()}};
  }
  void output(const fs::path& path) { j_["outputs"][path.string()] = sha256_hex(read_file(path)); }
  void write(const fs::path& path) const { write_file(path, j_.dump(2) + "\n"); }

 private:
  json j_;
};

struct ModelOptions {
  std::string model = "svm";
  std::string features;
  int degree = SvmParams{}.degree;
  double cost = SvmParams{}.cost;
  double gamma = SvmParams{}.gamma;
  double coef0 = SvmParams{}.coef0;
  double lambda = LogRegParams{}.lambda;
  std::size_t chunk_words = 500;
  std::size_t threads = 0;

  void add_to(CLI::App* app) {
    app->add_option("--model", model, "Learner: svm (polynomial SVM) or logreg")->capture_default_str();
    app->add_option("--features", features, "Feature set (default: writeprints for svm, koppel for logreg)");
    app->add_option("--degree", degree, "SVM polynomial degree")->capture_default_str();
    app->add_option("--cost", cost, "SVM cost C")->capture_default_str();
    app->add_option("--gamma", gamma, "SVM kernel gamma")->capture_default_str();
    app->add_option("--coef0", coef0, "SVM kernel coef0")->capture_default_str();
    app->add_option("--lambda", lambda, "Logistic regression L2 penalty")->capture_default_str();
    app->add_option("--chunk-words", chunk_words, "Training chunk length in words")->capture_default_str();
    app->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();
  }

  AttributionConfig config() const {
    const auto kind = parse_model_kind(model);
    if (!kind) throw InvalidArgument("unknown model '" + model + "' (svm, logreg)");
    AttributionConfig c = AttributionConfig::for_kind(*kind);
    if (!features.empty()) {
      const auto fs = parse_feature_set(features);
      if (!fs) throw InvalidArgument("unknown feature set '" + features + "'");
      c.features = *fs;
    }
    c.svm.degree = degree;
    c.svm.cost = cost;
    c.svm.gamma = gamma;
    c.svm.coef0 = coef0;
    c.logreg.lambda = lambda;
    return c;
  }

  json to_json() const {
    const AttributionConfig c = config();
    return {{"model", to_string(c.kind)},
            {"features", to_string(c.features)},
            {"feature_version", feature_spec(c.features).version},
            {"degree", degree},
            {"cost", cost},
            {"gamma", gamma},
            {"coef0", coef0},
            {"lambda", lambda},
            {"chunk_words", chunk_words}};
  }
};

std::vector<std::string> select_authors(const Corpus& corpus, const std::string& list) {
  if (list.empty()) return corpus.authors();
  auto authors = split_list(list);
  for (const auto& a : authors)
    if (!corpus.has_author(a)) throw DataError("unknown author: " + a);
  std::sort(authors.begin(), authors.end());
  return authors;
}

std::string default_manifest(const std::string& command) { return "stylo-" + command + "-manifest.json"; }

// Subcommands -------------------------------------------------------------------

struct Common {
  std::span<const std::string> args;
  std::ostream& out;
  std::ostream& err;
  std::string manifest;
};

int run_stats(const Common& c, const fs::path& root, const std::string& out_path) {
  const Corpus corpus = load_corpus(root);
  std::ostringstream csv;
  csv << "task,n_authors,avg_train_words,avg_test_words\n";
  for (const auto& r : corpus_stats(corpus))
    csv << r.task << ',' << r.n_authors << ',' << r.avg_train_words << ',' << r.avg_test_words << '\n';
  Manifest m("stats", c.args);
  m.corpus(root, corpus);
  if (out_path.empty()) {
    c.out << csv.str();
  } else {
    write_file(out_path, csv.str());
    m.output(out_path);
  }
  m.write(c.manifest.empty() ? (out_path.empty() ? default_manifest("stats") : out_path + ".manifest.json")
                             : c.manifest);
  return kExitOk;
}

int run_extract(const Common& c, const fs::path& root, const std::string& features, const std::string& out_path,
                std::size_t chunk_words, bool tasks, std::size_t threads) {
  const auto set = parse_feature_set(features);
  if (!set) throw InvalidArgument("unknown feature set '" + features + "'");
  const Corpus corpus = load_corpus(root);
  std::vector<std::string> ids, texts;
  if (tasks) {
    for (const auto& d : corpus.documents()) {
      if (d.role != Role::task) continue;
      ids.push_back(d.author_id + "/" + std::string(to_string(d.strategy)));
      texts.push_back(d.text);
    }
  } else {
    for (const auto& ch : chunk_background(corpus, chunk_words, [&](const std::string& w) { c.err << "warning: " << w << '\n'; })) {
      ids.push_back(fmt::format("{}#{}", ch.author_id, ch.chunk_index));
      texts.push_back(ch.text);
    }
  }
  const Eigen::MatrixXd rows = extract_rows(*set, texts, threads);
  const FeatureSpec& spec = feature_spec(*set);
  std::vector<FeatureVector> vecs;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    FeatureVector v{&spec, std::vector<double>(static_cast<std::size_t>(rows.cols()))};
    for (Eigen::Index j = 0; j < rows.cols(); ++j) v.values[static_cast<std::size_t>(j)] = rows(i, j);
    vecs.push_back(std::move(v));
  }
  std::ostringstream csv;
  write_feature_csv(csv, spec, ids, vecs);
  write_file(out_path, csv.str());
  Manifest m("extract", c.args);
  m.corpus(root, corpus);
  m["features"] = {{"name", to_string(*set)}, {"version", spec.version}, {"dimension", spec.dimension}};
  m["params"] = {{"chunk_words", chunk_words}, {"tasks", tasks}};
  m.output(out_path);
  m.write(c.manifest.empty() ? out_path + ".manifest.json" : c.manifest);
  c.out << fmt::format("wrote {} rows x {} features to {}\n", ids.size(), spec.dimension, out_path);
  return kExitOk;
}

int run_cv(const Common& c, const fs::path& root, const ModelOptions& mo, const std::string& authors_list,
           std::uint64_t seed, const std::string& out_path) {
  const AttributionConfig config = mo.config();
  const Corpus corpus = load_corpus(root);
  const auto authors = select_authors(corpus, authors_list);
  const auto warn = [&](const std::string& w) { c.err << "warning: " << w << '\n'; };
  std::vector<TrainChunk> chunks;
  for (auto& ch : chunk_background(corpus, mo.chunk_words, warn))
    if (std::binary_search(authors.begin(), authors.end(), ch.author_id)) chunks.push_back(std::move(ch));
  const double acc = crossval_10fold(chunks, config, seed, mo.threads);
  const std::string line = fmt::format("accuracy {:.6f} ({} authors, {} chunks, {}+{})\n", acc, authors.size(),
                                       chunks.size(), to_string(config.features), to_string(config.kind));
  c.out << line;
  Manifest m("cv", c.args);
  m.corpus(root, corpus);
  m["seed"] = seed;
  m["params"] = mo.to_json();
  m["accuracy"] = fmt::format("{:.6f}", acc);
  if (!out_path.empty()) {
    write_file(out_path, line);
    m.output(out_path);
  }
  m.write(c.manifest.empty() ? (out_path.empty() ? default_manifest("cv") : out_path + ".manifest.json")
                             : c.manifest);
  return kExitOk;
}

struct ExperimentArgs {
  fs::path corpus;
  std::string strategies;
  std::string sizes = "5,10,15,20,25,30,35,40";
  std::size_t sets = 1000;
  std::uint64_t seed = 0;
  std::string mode = "with_replacement";
  fs::path out_dir = "results";
};

int run_experiment_cmd(const Common& c, const ExperimentArgs& a, const ModelOptions& mo) {
  const AttributionConfig config = mo.config();
  const auto mode = parse_sampling_mode(a.mode);
  if (!mode) throw InvalidArgument("unknown sampling mode '" + a.mode + "'");
  std::vector<std::size_t> sizes;
  for (const auto& s : split_list(a.sizes)) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || v == 0) throw InvalidArgument("invalid set size '" + s + "'");
    sizes.push_back(v);
  }
  if (sizes.empty()) throw InvalidArgument("--sizes is empty");
  std::vector<std::optional<Strategy>> strategies;
  for (const auto& s : split_list(a.strategies)) {
    if (s == "cv") {
      strategies.emplace_back(std::nullopt);
      continue;
    }
    const auto st = parse_strategy(s);
    if (!st || *st == Strategy::none) throw InvalidArgument("unknown strategy '" + s + "'");
    strategies.emplace_back(*st);
  }
  if (strategies.empty()) throw InvalidArgument("--strategy is empty");

  const Corpus corpus = load_corpus(a.corpus);
  const CorpusAttributor attributor(corpus, config, mo.chunk_words, mo.threads);
  std::vector<ExperimentResult> results;
  json digests = json::object();
  for (const auto& st : strategies) {
    SamplingPlan plan;
    plan.pool = st ? corpus.authors_with(*st) : corpus.authors();
    plan.set_sizes = sizes;
    plan.n_sets = a.sets;
    plan.mode = *mode;
    plan.seed = a.seed;
    const std::string name = st ? std::string(to_string(*st)) : "cv";
    for (std::size_t s : sizes)
      if (s > plan.pool.size())
        throw DataError(fmt::format("set size {} exceeds the {} authors available for {}", s, plan.pool.size(), name));
    results.push_back(run_experiment(plan, attributor, st, ExperimentOptions{mo.threads}));
    digests[name] = results.back().config_digest;
  }

  std::ostringstream sets_csv, summary_csv;
  write_sets_csv(sets_csv, results);
  write_summary_csv(summary_csv, results);
  const fs::path sets_path = a.out_dir / "sets.csv", summary_path = a.out_dir / "summary.csv";
  write_file(sets_path, sets_csv.str());
  write_file(summary_path, summary_csv.str());
  c.out << summary_csv.str();

  Manifest m("experiment", c.args);
  m.corpus(a.corpus, corpus);
  m["seed"] = a.seed;
  m["params"] = mo.to_json();
  m["sampling"] = {{"sizes", sizes}, {"sets", a.sets}, {"mode", a.mode}, {"strategies", split_list(a.strategies)}};
  m["config_digests"] = digests;
  m.output(sets_path);
  m.output(summary_path);
  m.write(c.manifest.empty() ? a.out_dir / "manifest.json" : fs::path(c.manifest));
  return kExitOk;
}

int run_train(const Common& c, const fs::path& root, const ModelOptions& mo, const std::string& authors_list,
              const fs::path& out_path) {
  const AttributionConfig config = mo.config();
  const Corpus corpus = load_corpus(root);
  const auto authors = select_authors(corpus, authors_list);
  if (authors.size() < 2) throw DataError("training needs at least 2 authors");
  const CorpusAttributor attributor(corpus, config, mo.chunk_words, mo.threads);
  const TrainedModel model = attributor.train(authors);
  save_model(model, out_path);
  Manifest m("train", c.args);
  m.corpus(root, corpus);
  m["params"] = mo.to_json();
  m["model_digest"] = model_digest(model);
  m.output(out_path);
  m.write(c.manifest.empty() ? out_path.string() + ".manifest.json" : c.manifest);
  c.out << fmt::format("trained {} on {} authors -> {}\n", to_string(model.kind), authors.size(), out_path.string());
  return kExitOk;
}

int run_translate(const Common& c, const fs::path& root, const std::string& routes, const std::string& backend_spec,
                  const std::string& cache_dir, std::string out_dir, const std::string& inspect_path) {
  std::vector<Route> parsed;
  for (const auto& r : split_list(routes)) parsed.push_back(Route::parse(r));
  if (parsed.empty()) throw InvalidArgument("--route is empty");
  for (const auto& r : parsed)
    if (!r.strategy()) throw InvalidArgument("route " + r.to_string() + " is not one of en-de-en, en-ja-en, en-de-ja-en");
  auto backend = make_backend(backend_spec);
  std::unique_ptr<TranslationCache> cache;
  if (!cache_dir.empty()) cache = std::make_unique<TranslationCache>(cache_dir);
  if (out_dir.empty()) out_dir = root.string();

  Corpus corpus = load_corpus(root);
  const std::string input_digest = corpus.digest();
  std::vector<std::string> errors;
  std::ostringstream inspect;
  inspect << "route,author,length_ratio,identical,copied_oov_tokens\n";
  for (const auto& route : parsed) {
    auto outcome = translate_control_essays(corpus, route, *backend, cache.get());
    for (auto& e : outcome.errors) errors.push_back(route.to_string() + " " + e);
    c.out << fmt::format("{}: translated {} control essays\n", route.to_string(), outcome.translated);
    corpus = std::move(outcome.corpus);
    for (const auto& author : corpus.authors_with(*route.strategy())) {
      const auto* orig = corpus.task(author, Strategy::control);
      const auto report = inspect_round_trip(orig->text, corpus.task(author, *route.strategy())->text);
      inspect << fmt::format("{},{},{:.6f},{},{}\n", route.to_string(), author, report.length_ratio,
                             report.identical ? "true" : "false", fmt::join(report.copied_oov_tokens, ";"));
    }
  }
  write_corpus(corpus, out_dir);

  Manifest m("translate", c.args);
  m["corpus"] = {{"path", root.string()}, {"digest", input_digest}};
  m["output_corpus"] = {{"path", out_dir}, {"digest", corpus.digest()}};
  m["backend"] = backend->id();
  m["routes"] = split_list(routes);
  m["backend_calls"] = backend->calls();
  m["errors"] = errors;
  if (!inspect_path.empty()) {
    write_file(inspect_path, inspect.str());
    m.output(inspect_path);
  }
  m.write(c.manifest.empty() ? fs::path(out_dir) / "run-manifest.json" : fs::path(c.manifest));
  for (const auto& e : errors) c.err << "error: " << e << '\n';
  return errors.empty() ? kExitOk : kExitData;
}

int run_report(const Common& c, const std::vector<std::string>& summaries, const fs::path& out_dir,
               const std::string& title) {
  std::vector<SummaryRow> rows;
  for (const auto& path : summaries) {
    std::istringstream in(read_file(path));
    auto part = read_summary_csv(in);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  if (rows.empty()) throw DataError("summary files contain no rows");
  std::map<std::string, std::vector<SummaryRow>> by_model;
  for (const auto& r : rows) by_model[r.model].push_back(r);
  Manifest m("report", c.args);
  for (const auto& path : summaries) m["inputs"][path] = sha256_hex(read_file(path));
  for (const auto& [model, part] : by_model) {
    std::string stem = model;
    for (char& ch : stem)
      if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
    const fs::path path = out_dir / ("accuracy_" + stem + ".svg");
    write_file(path, accuracy_chart_svg(part, title.empty() ? model : title + " (" + model + ")"));
    m.output(path);
    c.out << "wrote " << path.string() << '\n';
  }
  m.write(c.manifest.empty() ? out_dir / "manifest.json" : fs::path(c.manifest));
  return kExitOk;
}

int run_serve(const Common& c, const std::vector<std::string>& model_specs, ServiceConfig config) {
  Manifest m("serve", c.args);
  for (const auto& spec : model_specs) {
    const auto eq = spec.find('=');
    const fs::path path = eq == std::string::npos ? fs::path(spec) : fs::path(spec.substr(eq + 1));
    const std::string id = eq == std::string::npos ? path.stem().string() : spec.substr(0, eq);
    if (id.empty()) throw InvalidArgument("empty model id in '" + spec + "'");
    config.models[id] = path;
    m["models"][id] = sha256_hex(read_file(path));
  }
  Service service(config);
  const int port = service.bind();
  m["listen"] = fmt::format("{}:{}", config.host, port);
  m.write(c.manifest.empty() ? default_manifest("serve") : c.manifest);
  c.out << fmt::format("listening on http://{}:{}\n", config.host, port) << std::flush;
  service.run();
  return kExitOk;
}

}  // namespace

int cli_run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Authorship attribution experiments and round-trip translation", "stylo"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string manifest;
  app.add_option("--manifest", manifest, "Where to write the run manifest");
  app.set_version_flag("--version", STYLO_VERSION);

  std::string corpus, out_path, authors, features = "writeprints_static";
  std::uint64_t seed = 0;
  std::size_t chunk_words = 500, threads = 0;
  bool tasks = false;
  ModelOptions mo;

  auto* stats = app.add_subcommand("stats", "Corpus statistics per task");
  stats->add_option("--corpus", corpus, "Corpus root directory")->required();
  stats->add_option("--out", out_path, "CSV file (default: stdout)");

  auto* extract = app.add_subcommand("extract", "Write feature vectors of training chunks or task documents");
  extract->add_option("--corpus", corpus, "Corpus root directory")->required();
  extract->add_option("--features", features, "writeprints_static or koppel512")->capture_default_str();
  extract->add_option("--out", out_path, "CSV file")->required();
  extract->add_option("--chunk-words", chunk_words, "Training chunk length in words")->capture_default_str();
  extract->add_flag("--tasks", tasks, "Featurize task documents instead of background chunks");
  extract->add_option("--threads", threads, "Worker threads (0: all cores)");

  auto* cv = app.add_subcommand("cv", "10-fold cross-validation on background chunks");
  cv->add_option("--corpus", corpus, "Corpus root directory")->required();
  cv->add_option("--authors", authors, "Comma-separated authors (default: all)");
  cv->add_option("--seed", seed, "Fold assignment seed")->capture_default_str();
  cv->add_option("--out", out_path, "Also write the result line to this file");
  mo.add_to(cv);

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "Sampled candidate-set evaluation");
  experiment->add_option("--corpus", ea.corpus, "Corpus root directory")->required();
  experiment->add_option("--strategy", ea.strategies, "Comma-separated strategies, or cv for the baseline")
      ->required();
  experiment->add_option("--sizes", ea.sizes, "Comma-separated candidate set sizes")->capture_default_str();
  experiment->add_option("--sets", ea.sets, "Sets sampled per size")->capture_default_str();
  experiment->add_option("--seed", ea.seed, "Sampling seed")->capture_default_str();
  experiment->add_option("--mode", ea.mode, "with_replacement or distinct_sets")->capture_default_str();
  experiment->add_option("--out-dir", ea.out_dir, "Directory for sets.csv and summary.csv")->capture_default_str();
  mo.add_to(experiment);

  fs::path model_out;
  auto* train = app.add_subcommand("train", "Train a model on background chunks and save it");
  train->add_option("--corpus", corpus, "Corpus root directory")->required();
  train->add_option("--authors", authors, "Comma-separated candidate pool (default: all)");
  train->add_option("--out", model_out, "Model file")->required();
  mo.add_to(train);

  std::string routes, backend = "identity", cache_dir, out_dir, inspect_path;
  auto* translate = app.add_subcommand("translate", "Round-trip translate control essays");
  translate->add_option("--corpus", corpus, "Corpus root directory")->required();
  translate->add_option("--route", routes, "Comma-separated routes such as en-ja-en")->required();
  translate->add_option("--backend", backend, "identity, reverse or http:<config.json>")->capture_default_str();
  translate->add_option("--cache", cache_dir, "Translation cache directory");
  translate->add_option("--out", out_dir, "Output corpus directory (default: update the input)");
  translate->add_option("--inspect", inspect_path, "CSV of round-trip inspection results");

  std::vector<std::string> summaries;
  fs::path chart_dir = "charts";
  std::string title;
  auto* report = app.add_subcommand("report", "Accuracy charts from summary CSV files");
  report->add_option("--summary", summaries, "summary.csv files")->required();
  report->add_option("--out-dir", chart_dir, "Chart directory")->capture_default_str();
  report->add_option("--title", title, "Chart title");

  std::vector<std::string> model_specs;
  ServiceConfig sc;
  std::string static_dir, serve_cache;
  auto* serve = app.add_subcommand("serve", "Local HTTP attribution service");
  serve->add_option("--model", model_specs, "Model as id=path (repeatable)")->required();
  serve->add_option("--host", sc.host, "Listen address")->capture_default_str();
  serve->add_option("--port", sc.port, "Listen port (0: any free port)")->capture_default_str();
  serve->add_option("--backend", sc.backend, "Translation backend for /roundtrip")->capture_default_str();
  serve->add_option("--cache", serve_cache, "Translation cache directory");
  serve->add_option("--static", static_dir, "Directory of browser assets served at /");
  serve->add_option("--k", sc.default_k, "Default number of top features")->capture_default_str();

  if (args.empty()) {
    err << app.help();
    return kExitUsage;
  }
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << STYLO_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitUsage;
  }

  const Common common{args, out, err, manifest};
  try {
    if (*stats) return run_stats(common, corpus, out_path);
    if (*extract) return run_extract(common, corpus, features, out_path, chunk_words, tasks, threads);
    if (*cv) return run_cv(common, corpus, mo, authors, seed, out_path);
    if (*experiment) return run_experiment_cmd(common, ea, mo);
    if (*train) return run_train(common, corpus, mo, authors, model_out);
    if (*translate) return run_translate(common, corpus, routes, backend, cache_dir, out_dir, inspect_path);
    if (*report) return run_report(common, summaries, chart_dir, title);
    if (*serve) {
      if (!serve_cache.empty()) sc.cache_dir = serve_cache;
      if (!static_dir.empty()) sc.static_dir = static_dir;
      return run_serve(common, model_specs, sc);
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace stylo
