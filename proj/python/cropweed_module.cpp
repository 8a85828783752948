// pybind11 surface over the core pipeline operations. Thin by design: the
// bindings translate containers and route into the same functions the CLI
// uses, so python results match CLI artifacts bit for bit.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cropweed/dataset.hpp"
#include "cropweed/ensemble.hpp"
#include "cropweed/genotype.hpp"
#include "cropweed/model.hpp"
#include "cropweed/objectives.hpp"
#include "cropweed/png_io.hpp"
#include "cropweed/segmentation.hpp"
#include "cropweed/synth.hpp"
#include "cropweed/train.hpp"
#include "cropweed/weights_io.hpp"

namespace py = pybind11;
using namespace cropweed;

namespace {

py::dict report_to_dict(const EvalReport& r, const Taxonomy& tax) {
  py::dict d;
  d["accuracy"] = r.accuracy;
  d["ckr"] = r.ckr;
  d["recall_crop"] = r.recall_crop;
  d["correct"] = r.correct;
  d["moderate"] = r.moderate;
  d["minor"] = r.minor;
  d["considerable"] = r.considerable;
  d["dangerous"] = r.dangerous;
  d["n_samples"] = r.n_samples;
  py::list labels;
  for (int i = 0; i < tax.size(); ++i) labels.append(tax.name_of(i));
  labels.append(std::string("unknown"));
  d["confusion_labels"] = labels;
  d["confusion"] = r.confusion;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "crop/weed classification core: segmentation, sampling, metrics, "
            "genotypes, training and the decision ensemble";

  py::class_<Taxonomy>(m, "Taxonomy")
      .def(py::init<>())
      .def("add",
           [](Taxonomy& t, const std::string& name, const std::string& group) {
             t.add(name, parse_group(group));
           },
           py::arg("name"), py::arg("group"))
      .def("index_of", &Taxonomy::index_of)
      .def("name_of", &Taxonomy::name_of)
      .def("is_crop", &Taxonomy::is_crop)
      .def_property_readonly("size", &Taxonomy::size)
      .def_property_readonly("unknown_index", &Taxonomy::unknown_index)
      .def_property_readonly("crops", &Taxonomy::crops)
      .def_property_readonly("weeds", &Taxonomy::weeds);

  // ------------------------------------------------------------- metrics
  m.def("contain", &contain, py::arg("template_cats"), py::arg("target"),
        "membership indicator: out[i] = 1 iff target[i] appears in template_cats");
  m.def("accuracy", &accuracy, py::arg("y"), py::arg("yhat"));
  m.def(
      "nmw_indicator",
      [](const LabelVector& y, const LabelVector& yhat, const Taxonomy& tax,
         const std::string& strictness) {
        return nmw_indicator(y, yhat, tax, parse_strictness(strictness));
      },
      py::arg("y"), py::arg("yhat"), py::arg("tax"), py::arg("strictness") = "text_iff");
  m.def(
      "error_category",
      [](int y, int yhat, const Taxonomy& tax) {
        return error_class_name(classify_error(y, yhat, tax));
      },
      py::arg("y"), py::arg("yhat"), py::arg("tax"),
      "correct | moderate | minor | considerable | dangerous");
  m.def(
      "evaluate",
      [](const LabelVector& y, const LabelVector& yhat, const Taxonomy& tax) {
        return report_to_dict(evaluate_predictions(y, yhat, tax), tax);
      },
      py::arg("y"), py::arg("yhat"), py::arg("tax"));

  // ------------------------------------------------------------- dataset
  m.def(
      "sample_rates",
      [](const std::string& manifest, double alpha, double beta) {
        Dataset ds = load_manifest_resolved(manifest);
        return compute_sample_rates(ds, alpha, beta).rates;
      },
      py::arg("manifest"), py::arg("alpha") = 0.7, py::arg("beta") = 0.3,
      "per-weed-category keep rates for the CD -> SD sampling");
  m.def(
      "class_counts",
      [](const std::string& manifest) {
        Dataset ds = load_manifest_resolved(manifest);
        std::map<std::string, long long> counts;
        for (const Sample& s : ds.samples) ++counts[s.category];
        return counts;
      },
      py::arg("manifest"));

  // ------------------------------------------------------------ genotype
  m.def(
      "enumerate_genotypes",
      [](const std::string& family) {
        std::vector<std::string> keys;
        for (const Genotype& g : enumerate_family(parse_family(family)))
          keys.push_back(genotype_key(g));
        return keys;
      },
      py::arg("family"), "all canonical keys of one family, in enumeration order");
  m.def(
      "param_count",
      [](const std::string& key, int head_classes, int input_side) {
        return param_count(parse_genotype_key(key), head_classes, input_side);
      },
      py::arg("genotype"), py::arg("head_classes"), py::arg("input_side") = 64);

  // -------------------------------------------------------- segmentation
  m.def(
      "segment_image",
      [](const std::string& path, double t_size, double t_ratio) {
        SegmentationParams p;
        p.t_size = t_size;
        p.t_ratio = t_ratio;
        p.validate();
        RgbImage img = read_png(path);
        py::list out;
        for (const PlantSegment& s : segment_field_image(img, p)) {
          py::dict d;
          d["x"] = s.bbox.x;
          d["y"] = s.bbox.y;
          d["w"] = s.bbox.w;
          d["h"] = s.bbox.h;
          d["area_fraction"] = s.area_fraction;
          d["shape_ratio"] = s.shape_ratio;
          out.append(d);
        }
        return out;
      },
      py::arg("path"), py::arg("t_size") = 0.001, py::arg("t_ratio") = 0.2,
      "HSV-window segmentation of one field image; returns bbox metadata per plant");

  // ------------------------------------------------------------ training
  m.def(
      "train",
      [](const std::string& train_manifest, const std::string& val_manifest,
         const std::string& genotype, const std::string& objective, int epochs, int batch_size,
         double learning_rate, double momentum, int input_side, uint64_t seed,
         const std::string& weights_out) {
        Dataset train_ds = load_manifest_resolved(train_manifest);
        Dataset val_ds = load_manifest_resolved(val_manifest);
        train_ds.taxonomy.validate();
        ObjectiveKind kind = parse_objective(objective);
        const int C = train_ds.taxonomy.size();
        int head = kind == ObjectiveKind::CCE ? C : C + 1;
        TrainConfig tc;
        tc.epochs = epochs;
        tc.batch_size = batch_size;
        tc.learning_rate = learning_rate;
        tc.momentum = momentum;
        tc.input_side = input_side;
        tc.seed = seed;
        tc.validate();
        TensorDataset train_t = load_tensor_dataset(train_ds, input_side);
        TensorDataset val_t = load_tensor_dataset(val_ds, input_side);
        Model model = realize(parse_genotype_key(genotype), head, seed, input_side);
        TrainResult r = train_model(model, train_t, val_t, kind, tc);
        if (!weights_out.empty()) save_weights(model, weights_out);
        py::dict d;
        d["final_accuracy"] = r.final_accuracy;
        d["final_nmw"] = r.final_nmw;
        py::list hist;
        for (const EpochStats& e : r.history) {
          py::dict row;
          row["epoch"] = e.epoch;
          row["accuracy"] = e.accuracy;
          row["nmw"] = e.nmw;
          hist.append(row);
        }
        d["history"] = hist;
        return d;
      },
      py::arg("train_manifest"), py::arg("val_manifest"), py::arg("genotype"),
      py::arg("objective") = "cce", py::arg("epochs") = 8, py::arg("batch_size") = 32,
      py::arg("learning_rate") = 0.01, py::arg("momentum") = 0.9, py::arg("input_side") = 64,
      py::arg("seed") = 0, py::arg("weights_out") = "");
  m.def(
      "predict",
      [](const std::string& weights, const std::string& manifest) {
        Model model = load_weights(weights);
        Dataset ds = load_manifest_resolved(manifest);
        return predict(model, load_tensor_dataset(ds, model.input_side));
      },
      py::arg("weights"), py::arg("manifest"));

  // ------------------------------------------------------------ ensemble
  m.def(
      "ensemble_run",
      [](const std::vector<LabelVector>& votes, const Taxonomy& tax,
         const std::map<std::string, long long>& budgets, bool strict_budget) {
        std::map<int, long long> totals;
        for (const auto& [name, count] : budgets) {
          int idx = tax.index_of(name);
          if (idx < 0) throw std::invalid_argument("unknown budget category '" + name + "'");
          totals[idx] = count;
        }
        py::list out;
        for (const EnsembleDecision& d :
             ensemble_run(votes, tax, totals, EnsemblePolicy{strict_budget})) {
          py::dict row;
          row["category"] = d.category;
          row["cate"] = d.cate;
          row["type"] = d.type;
          row["act"] = d.act;
          row["rule_fired"] = d.rule_fired;
          out.append(row);
        }
        return out;
      },
      py::arg("votes"), py::arg("tax"), py::arg("budgets"), py::arg("strict_budget") = false,
      "per-object consensus decisions; votes is one label vector per model");

  // ------------------------------------------------------------ synthetic
  m.def(
      "gen_plants",
      [](const std::string& out_dir, int per_category, uint64_t seed, double ambiguous_fraction,
         int side) {
        PlantsSpec spec{per_category, seed, ambiguous_fraction, side};
        return gen_synthetic_plants(spec, out_dir).size();
      },
      py::arg("out_dir"), py::arg("per_category") = 200, py::arg("seed") = 0,
      py::arg("ambiguous_fraction") = 0.0, py::arg("side") = 64,
      "renders the 4-class synthetic plant set; returns the sample count");
}
