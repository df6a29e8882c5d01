// Copyright 2026 The ftqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Structured results cross the boundary as JSON text and
// are decoded on the Python side.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ftqa/corpus.h"
#include "ftqa/error.h"
#include "ftqa/eval.h"
#include "ftqa/grounding.h"
#include "ftqa/index.h"
#include "ftqa/model.h"
#include "ftqa/pipeline.h"
#include "ftqa/synth.h"

namespace py = pybind11;

namespace ftqa {
namespace {

std::unique_ptr<Workspace> OpenWorkspace(const std::string &documents,
                                         const std::string &entities,
                                         const PipelineConfig &config) {
  config.Validate();
  return std::make_unique<Workspace>(Corpus(ReadDocuments(documents), ReadEntities(entities)),
                                     config);
}

std::string GroundText(const Workspace &ws, const PipelineConfig &config, const std::string &text,
                       const std::string &question_id, std::optional<std::string> answer,
                       bool training) {
  const Question q{question_id, text, std::move(answer)};
  return GroundedGraphToJson(ws.Ground(q, config.Grounding(training)));
}

std::vector<std::string> GroundFile(const Workspace &ws, const PipelineConfig &config,
                                    const std::string &questions, bool training) {
  std::vector<std::string> out;
  for (const GroundedGraph &g :
       ws.GroundAll(ReadQuestions(questions), config.Grounding(training), config.threads)) {
    out.push_back(GroundedGraphToJson(g));
  }
  return out;
}

std::vector<GroundedGraph> Decode(const std::vector<std::string> &graphs) {
  std::vector<GroundedGraph> out;
  for (const std::string &g : graphs) out.push_back(GroundedGraphFromJson(g));
  return out;
}

std::string TrainAndEvaluateJson(const std::vector<std::string> &train,
                                 const std::vector<std::string> &test,
                                 const PipelineConfig &config, const std::string &checkpoint) {
  std::unique_ptr<DelftModel> model;
  const Experiment e = TrainAndEvaluate(Decode(train), Decode(test), config, &model);
  if (!checkpoint.empty()) model->Save(checkpoint);
  return e.metrics.ToJson();
}

py::tuple ToyGradCheck(double epsilon, double tolerance) {
  const GroundedGraph graph = ToyGroundedGraph();
  const DelftModel model(ToyModelConfig(), TokenVocabulary::Build({graph}));
  const nn::GradCheckReport report = CheckModelGradients(model, graph, epsilon, tolerance);
  return py::make_tuple(report.passed, report.max_relative_error);
}

}  // namespace
}  // namespace ftqa

PYBIND11_MODULE(_core, m) {
  using namespace ftqa;
  m.doc() = "Question answering over a free-text entity graph";

  // Translators run newest first, so the subclasses are registered last.
  const auto &error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<FormatError>(m, "FormatError", error.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
  py::register_exception<NumericError>(m, "NumericError", error.ptr());

  py::class_<Index>(m, "Index")
      .def(py::init<const std::vector<std::string> &, std::vector<std::string>>(),
           py::arg("units"), py::arg("ids") = std::vector<std::string>())
      .def("retrieve",
           [](const Index &index, const std::string &query, size_t k) {
             std::vector<std::pair<size_t, double>> out;
             for (const ScoredUnit &u : index.Retrieve(query, k)) out.emplace_back(u.unit, u.score);
             return out;
           },
           py::arg("query"), py::arg("k"))
      .def("cosine", py::overload_cast<std::string_view, std::string_view>(&Index::Cosine,
                                                                          py::const_),
           py::arg("a"), py::arg("b"))
      .def_property_readonly("unit_count", &Index::unit_count);

  py::class_<SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init<>())
      .def_readwrite("entities", &SyntheticSpec::entities)
      .def_readwrite("facts_per_entity", &SyntheticSpec::facts_per_entity)
      .def_readwrite("second_relation_rate", &SyntheticSpec::second_relation_rate)
      .def_readwrite("train_questions", &SyntheticSpec::train_questions)
      .def_readwrite("test_questions", &SyntheticSpec::test_questions)
      .def_readwrite("distractor_density", &SyntheticSpec::distractor_density)
      .def_readwrite("hops", &SyntheticSpec::hops)
      .def("validate", &SyntheticSpec::Validate);

  m.def("write_synthetic",
        [](const SyntheticSpec &spec, uint64_t seed, const std::string &dir) {
          WriteSynthetic(GenerateSynthetic(spec, seed), dir);
        },
        py::arg("spec"), py::arg("seed"), py::arg("dir"),
        "Generates a benchmark and writes its JSONL files into dir.");

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("link_threshold", &PipelineConfig::link_threshold)
      .def_readwrite("retrieved_docs", &PipelineConfig::retrieved_docs)
      .def_readwrite("sentences_per_edge", &PipelineConfig::sentences_per_edge)
      .def_readwrite("top_k_train", &PipelineConfig::top_k_train)
      .def_readwrite("top_k_eval", &PipelineConfig::top_k_eval)
      .def_readwrite("prefilter_sentences", &PipelineConfig::prefilter_sentences)
      .def_readwrite("epochs", &PipelineConfig::epochs)
      .def_readwrite("batch_size", &PipelineConfig::batch_size)
      .def_readwrite("learning_rate", &PipelineConfig::learning_rate)
      .def_readwrite("clip_norm", &PipelineConfig::clip_norm)
      .def_readwrite("scorer_negatives", &PipelineConfig::scorer_negatives)
      .def_readwrite("seed", &PipelineConfig::seed)
      .def_readwrite("threads", &PipelineConfig::threads)
      .def("validate", &PipelineConfig::Validate)
      .def("to_json", &PipelineConfig::ToJson)
      .def_static("from_json", py::overload_cast<const std::string &>(&PipelineConfig::FromJson),
                  py::arg("text"))
      .def("fingerprint", &PipelineConfig::Fingerprint)
      .def("enable_ablation",
           [](PipelineConfig &c, const std::string &name) { EnableAblation(c.model.ablation, name); },
           py::arg("name"));

  py::class_<Workspace>(m, "Workspace")
      .def(py::init(&OpenWorkspace), py::arg("documents"), py::arg("entities"),
           py::arg("config") = PipelineConfig())
      .def_property_readonly("node_count", [](const Workspace &w) { return w.graph().nodes().size(); })
      .def_property_readonly("edge_count", [](const Workspace &w) { return w.graph().edges().size(); })
      .def("link",
           [](const Workspace &w, const std::string &text, double threshold) {
             std::vector<std::pair<std::string, double>> out;
             for (const Mention &mention : w.corpus().LinkText(text, threshold)) {
               out.emplace_back(mention.entity_id, mention.confidence);
             }
             return out;
           },
           py::arg("text"), py::arg("threshold"))
      .def("train_scorer",
           [](Workspace &w, const std::string &questions, const PipelineConfig &config) {
             const auto weights = w.TrainScorer(ReadQuestions(questions), config);
             return py::make_tuple(weights.w[0], weights.w[1], weights.w[2], weights.bias);
           },
           py::arg("questions"), py::arg("config"))
      .def("ground", &GroundText, py::arg("config"), py::arg("text"),
           py::arg("question_id") = "q", py::arg("answer") = std::nullopt,
           py::arg("training") = false)
      .def("ground_file", &GroundFile, py::arg("config"), py::arg("questions"),
           py::arg("training") = false);

  py::class_<DelftModel>(m, "Model")
      .def_static("load", &DelftModel::Load, py::arg("path"))
      .def("save", &DelftModel::Save, py::arg("path"))
      .def("predict",
           [](const DelftModel &model, const std::string &graph) {
             return model.Predict(GroundedGraphFromJson(graph)).ToJson();
           },
           py::arg("graph"))
      .def("config_json", [](const DelftModel &model) { return model.config().ToJson(); });

  m.def("train_and_evaluate", &TrainAndEvaluateJson, py::arg("train"), py::arg("test"),
        py::arg("config"), py::arg("checkpoint") = "",
        "Trains on grounded graphs and returns the test metrics as JSON.");
  m.def("toy_gradcheck", &ToyGradCheck, py::arg("epsilon") = 1e-5, py::arg("tolerance") = 1e-4,
        "Gradient check of the model on the built-in toy graph.");
}
