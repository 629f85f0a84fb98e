#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "stylo/cli.hpp"
#include "stylo/corpus.hpp"
#include "stylo/error.hpp"
#include "stylo/experiments.hpp"
#include "stylo/features.hpp"
#include "stylo/learners.hpp"
#include "stylo/risk.hpp"
#include "stylo/text.hpp"
#include "stylo/translation.hpp"

namespace py = pybind11;
using namespace stylo;

namespace {

FeatureSetName feature_set(const std::string& name) {
  const auto fs = parse_feature_set(name);
  if (!fs) throw InvalidArgument("unknown feature set '" + name + "'");
  return *fs;
}

AttributionConfig config_for(const std::string& model) {
  const auto kind = parse_model_kind(model);
  if (!kind) throw InvalidArgument("unknown model '" + model + "'");
  return AttributionConfig::for_kind(*kind);
}

std::optional<Strategy> strategy_arg(const std::string& name) {
  if (name == "cv") return std::nullopt;
  const auto s = parse_strategy(name);
  if (!s || *s == Strategy::none) throw InvalidArgument("unknown strategy '" + name + "'");
  return s;
}

py::dict report_dict(const RiskReport& r) {
  py::dict scores;
  for (std::size_t i = 0; i < r.candidates.size(); ++i) scores[py::str(r.candidates[i])] = r.scores[i];
  py::list features;
  for (const auto& f : r.top_features) features.append(py::make_tuple(f.feature, f.contribution));
  py::dict d;
  d["model_kind"] = std::string(to_string(r.kind));
  d["pool"] = r.candidates;
  d["score_kind"] = r.score_kind;
  d["scores"] = scores;
  d["top_label"] = r.top_label;
  d["top_score"] = r.top_score;
  d["intercept"] = r.intercept;
  d["top_features"] = features;
  return d;
}

}  // namespace

PYBIND11_MODULE(_stylo, m) {
  m.doc() = "Stylometric attribution core";
  m.attr("__version__") = "0.1.0";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<TranslationError>(m, "TranslationError", PyExc_RuntimeError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

  // Text ---------------------------------------------------------------------
  m.def("tokenize", [](const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& t : tokenize(text)) out.emplace_back(t.surface, std::string(to_string(t.kind)));
    return out;
  }, py::arg("text"), "Tokens as (surface, kind) pairs.");
  m.def("split_sentences", [](const std::string& text) { return split_sentences(text); }, py::arg("text"));
  m.def("pos_tag", [](const std::string& text) {
    const auto tokens = tokenize(text);
    const auto tags = pos_tag(tokens);
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) out.emplace_back(tokens[i].surface, std::string(to_string(tags[i])));
    return out;
  }, py::arg("text"));

  // Features -------------------------------------------------------------------
  m.def("extract", [](const std::string& features, const std::string& text) {
    return extract(feature_set(features), text).values;
  }, py::arg("features"), py::arg("text"));
  m.def("feature_names", [](const std::string& features) { return feature_spec(feature_set(features)).feature_names; },
        py::arg("features"));

  // Corpus ---------------------------------------------------------------------
  py::class_<Corpus>(m, "Corpus")
      .def_property_readonly("authors", &Corpus::authors)
      .def("digest", &Corpus::digest)
      .def("authors_with", [](const Corpus& c, const std::string& s) { return c.authors_with(*strategy_arg(s)); })
      .def("__len__", [](const Corpus& c) { return c.documents().size(); });
  m.def("load_corpus", &load_corpus, py::arg("root"));
  m.def("corpus_stats", [](const Corpus& c) {
    std::vector<std::tuple<std::string, std::size_t, long, long>> out;
    for (const auto& r : corpus_stats(c)) out.emplace_back(r.task, r.n_authors, r.avg_train_words, r.avg_test_words);
    return out;
  }, py::arg("corpus"));
  m.def("chunk_background", [](const Corpus& c, std::size_t target) {
    std::vector<std::tuple<std::string, std::size_t, std::string>> out;
    for (auto& ch : chunk_background(c, target)) out.emplace_back(ch.author_id, ch.word_count, std::move(ch.text));
    return out;
  }, py::arg("corpus"), py::arg("target_words") = 500, "Chunks as (author, word_count, text).");

  // Models ---------------------------------------------------------------------
  py::class_<TrainedModel>(m, "TrainedModel")
      .def_property_readonly("kind", [](const TrainedModel& t) { return std::string(to_string(t.kind)); })
      .def_property_readonly("labels", [](const TrainedModel& t) { return t.label_map; })
      .def_property_readonly("dimension", [](const TrainedModel& t) { return t.dimension; })
      .def("digest", [](const TrainedModel& t) { return model_digest(t); })
      .def("predict", [](const TrainedModel& t, const std::vector<double>& raw) {
        const auto p = predict(t, raw);
        return py::make_tuple(p.label, p.scores);
      }, py::arg("raw"), "Label and scores for a raw feature vector.")
      .def("predict_text", [](const TrainedModel& t, const std::string& text) {
        if (!t.feature_set) throw InvalidArgument("model has no feature set");
        return predict(t, extract(*t.feature_set, text)).label;
      }, py::arg("text"));
  m.def("fit_model", [](const Eigen::MatrixXd& rows, const std::vector<std::string>& labels, const std::string& model,
                        const std::string& features) {
    AttributionConfig c = config_for(model);
    if (!features.empty()) c.features = feature_set(features);
    return fit_model(rows, labels, c);
  }, py::arg("rows"), py::arg("labels"), py::arg("model") = "svm", py::arg("features") = "");
  m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));
  m.def("risk_report", [](const TrainedModel& t, const std::string& draft, std::size_t k) {
    return report_dict(risk_report(t, draft, k));
  }, py::arg("model"), py::arg("draft"), py::arg("k") = 10);

  // Experiments ----------------------------------------------------------------
  m.def("confidence_interval", [](const std::vector<double>& v) { return confidence_interval(v); }, py::arg("values"));
  m.def("crossval", [](const Corpus& c, const std::string& model, std::uint64_t seed, std::size_t chunk_words) {
    py::gil_scoped_release release;
    return crossval_10fold(chunk_background(c, chunk_words), config_for(model), seed);
  }, py::arg("corpus"), py::arg("model") = "svm", py::arg("seed") = 0, py::arg("chunk_words") = 500);
  m.def("run_experiment", [](const Corpus& c, const std::string& strategy, std::vector<std::size_t> sizes,
                             std::size_t n_sets, std::uint64_t seed, const std::string& model, std::size_t threads) {
    const auto st = strategy_arg(strategy);
    std::ostringstream csv;
    {
      py::gil_scoped_release release;
      const CorpusAttributor attributor(c, config_for(model), 500, threads);
      SamplingPlan plan;
      plan.pool = st ? c.authors_with(*st) : c.authors();
      plan.set_sizes = std::move(sizes);
      plan.n_sets = n_sets;
      plan.seed = seed;
      const ExperimentResult r = run_experiment(plan, attributor, st, ExperimentOptions{threads});
      write_summary_csv(csv, std::span<const ExperimentResult>(&r, 1));
    }
    return csv.str();
  }, py::arg("corpus"), py::arg("strategy"), py::arg("sizes"), py::arg("n_sets") = 1000, py::arg("seed") = 0,
     py::arg("model") = "svm", py::arg("threads") = 0, "Runs the sampled evaluation; returns the summary CSV.");

  // Translation ----------------------------------------------------------------
  py::class_<DiffReport>(m, "DiffReport")
      .def_readonly("length_ratio", &DiffReport::length_ratio)
      .def_readonly("copied_oov_tokens", &DiffReport::copied_oov_tokens)
      .def_readonly("identical", &DiffReport::identical);
  m.def("round_trip", [](const std::string& text, const std::string& route, const std::string& backend) {
    auto b = make_backend(backend);
    return round_trip(text, Route::parse(route), *b);
  }, py::arg("text"), py::arg("route"), py::arg("backend") = "identity");
  m.def("inspect_round_trip", &inspect_round_trip, py::arg("original"), py::arg("translated"));

  // CLI ------------------------------------------------------------------------
  m.def("cli_run", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli_run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the command line; returns (exit_code, stdout, stderr).");
}
