// cropweed command-line pipeline: synthetic data generation, segmentation,
// dataset sampling/splitting, architecture search, training and evaluation.
// Every stage reads persisted artifacts, writes its outputs plus a
// run_manifest.json of content hashes, and is deterministic under --seed.
#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cropweed/config.hpp"
#include "cropweed/dataset.hpp"
#include "cropweed/ensemble.hpp"
#include "cropweed/genotype.hpp"
#include "cropweed/model.hpp"
#include "cropweed/objectives.hpp"
#include "cropweed/png_io.hpp"
#include "cropweed/reports.hpp"
#include "cropweed/rng.hpp"
#include "cropweed/run_manifest.hpp"
#include "cropweed/search.hpp"
#include "cropweed/segmentation.hpp"
#include "cropweed/synth.hpp"
#include "cropweed/train.hpp"
#include "cropweed/weights_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cropweed;

namespace {

// Rewrites sample paths relative to the manifest we are about to write so
// manifests stay portable.
Dataset rebase_for(const Dataset& ds, const fs::path& out_dir) {
  Dataset out = ds;
  for (Sample& s : out.samples) {
    std::error_code ec;
    fs::path rel = fs::relative(s.image_path, out_dir, ec);
    if (!ec && !rel.empty()) s.image_path = rel.string();
  }
  return out;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  uint64_t seed = 0;
  bool seed_set = false;

  KeyValueConfig config() const {
    KeyValueConfig cfg;
    if (!config_path.empty()) cfg = KeyValueConfig::from_file(config_path);
    return cfg;
  }
  uint64_t final_seed(const KeyValueConfig& cfg) const {
    return seed_set ? seed : cfg.u64("seed", 0);
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "key=value config file");
  cmd->add_option("--out", opts.out_dir, "output directory")->required();
  cmd->add_option("--seed", opts.seed, "global seed")->each([&](const std::string&) {
    opts.seed_set = true;
  });
}

void finish_run(const std::string& stage, const fs::path& out_dir, uint64_t seed,
                const std::vector<std::string>& artifacts) {
  RunManifest m;
  m.stage = stage;
  m.seed = seed;
  for (const std::string& rel : artifacts) add_artifact(m, out_dir.string(), rel);
  write_run_manifest(out_dir.string(), m);
}

// ---------------------------------------------------------------- segment

struct SegmentOpts {
  CommonOpts common;
  std::string input_dir;
  SegmentationParams params;
};

void run_segment(SegmentOpts& o) {
  KeyValueConfig cfg = o.common.config();
  uint64_t seed = o.common.final_seed(cfg);
  SegmentationParams p = o.params;
  p.validate();

  fs::path out_dir(o.common.out_dir);
  fs::create_directories(out_dir / "segments");

  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(o.input_dir))
    if (entry.is_regular_file()) files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());

  std::string index = "image,segment,x,y,w,h,area_fraction,shape_ratio\n";
  json errors = json::array();
  std::vector<std::string> artifacts;
  for (const std::string& file : files) {
    try {
      RgbImage img = read_png(file);
      auto segments = segment_field_image(img, p);
      auto rows = save_segments((out_dir / "segments").string(), stem_of(file), segments);
      for (size_t k = 0; k < rows.size(); ++k) {
        index += rows[k] + "\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "segments/%s_seg%zu.png", stem_of(file).c_str(), k);
        artifacts.push_back(buf);
      }
    } catch (const std::exception& e) {
      errors.push_back({{"file", file}, {"error", e.what()}});
    }
  }
  write_text_file((out_dir / "index.csv").string(), index);
  write_text_file((out_dir / "errors.json").string(), json({{"errors", errors}}).dump(2) + "\n");
  artifacts.insert(artifacts.begin(), {"index.csv", "errors.json"});
  finish_run("segment", out_dir, seed, artifacts);
  std::cout << "segment: " << files.size() << " files, " << errors.size() << " errors -> "
            << (out_dir / "index.csv").string() << "\n";
}

// ----------------------------------------------------------------- sample

struct SampleOpts {
  CommonOpts common;
  std::string manifest;
  double alpha = -1, beta = -1;
};

void run_sample(SampleOpts& o) {
  KeyValueConfig cfg = o.common.config();
  uint64_t seed = o.common.final_seed(cfg);
  double alpha = o.alpha >= 0 ? o.alpha : cfg.real("sample.alpha", 0.7);
  double beta = o.beta >= 0 ? o.beta : cfg.real("sample.beta", 0.3);

  Dataset cd = load_manifest_resolved(o.manifest);
  cd.taxonomy.validate();
  SampleRatePlan plan = compute_sample_rates(cd, alpha, beta);
  Dataset sd = build_sampled_dataset(cd, plan, seed);

  fs::path out_dir(o.common.out_dir);
  fs::create_directories(out_dir);
  write_manifest((out_dir / "sd_manifest.csv").string(), rebase_for(sd, out_dir));

  json stats;
  stats["cd"] = json::parse(class_stats_json(class_stats(cd)));
  stats["sd"] = json::parse(class_stats_json(class_stats(sd), &plan));
  write_text_file((out_dir / "stats.json").string(), stats.dump(2) + "\n");

  finish_run("sample", out_dir, seed, {"sd_manifest.csv", "stats.json"});
  std::cout << "sample: " << cd.size() << " -> " << sd.size() << " samples, weed:crop ratio "
            << class_stats(sd).weed_crop_ratio << "\n";
}

// ------------------------------------------------------------------ split

struct SplitOpts {
  CommonOpts common;
  std::string manifest;
  double train = 0.8, val = 0.1, test = 0.1;
};

void run_split(SplitOpts& o) {
  KeyValueConfig cfg = o.common.config();
  uint64_t seed = o.common.final_seed(cfg);

  Dataset ds = load_manifest_resolved(o.manifest);
  SplitResult split = split_dataset(ds, {o.train, o.val, o.test}, seed);

  fs::path out_dir(o.common.out_dir);
  fs::create_directories(out_dir);
  write_manifest((out_dir / "train_manifest.csv").string(), rebase_for(split.train, out_dir));
  write_manifest((out_dir / "val_manifest.csv").string(), rebase_for(split.val, out_dir));
  write_manifest((out_dir / "test_manifest.csv").string(), rebase_for(split.test, out_dir));

  json doc;
  doc["counts"] = {{"train", split.train.size()}, {"val", split.val.size()},
                   {"test", split.test.size()}};
  doc["warnings"] = split.warnings;
  write_text_file((out_dir / "split_stats.json").string(), doc.dump(2) + "\n");

  finish_run("split", out_dir, seed,
             {"train_manifest.csv", "val_manifest.csv", "test_manifest.csv", "split_stats.json"});
  for (const std::string& w : split.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "split: " << split.train.size() << "/" << split.val.size() << "/"
            << split.test.size() << " train/val/test\n";
}

// ----------------------------------------------------------------- search

struct SearchOpts {
  CommonOpts common;
  std::vector<std::string> manifests;
  std::string families_csv = "vanilla,conv,dilated";
  int trials = -1, top_k = -1, probe_epochs = -1, input_side = -1;
  bool resume = false;
};

void run_search(SearchOpts& o) {
  KeyValueConfig cfg = o.common.config();
  uint64_t seed = o.common.final_seed(cfg);

  SearchConfig sc;
  sc.trials_per_dataset =
      o.trials > 0 ? o.trials : static_cast<int>(cfg.integer("search.trials_per_dataset", 12));
  sc.keep_top_k = o.top_k > 0 ? o.top_k : static_cast<int>(cfg.integer("search.keep_top_k", 5));
  sc.probe_epochs =
      o.probe_epochs > 0 ? o.probe_epochs : static_cast<int>(cfg.integer("search.probe_epochs", 5));
  sc.seed = seed;
  int side = o.input_side > 0 ? o.input_side : static_cast<int>(cfg.integer("train.input_side", 64));
  sc.validate();

  std::vector<Family> families;
  for (size_t at = 0; at < o.families_csv.size();) {
    size_t comma = o.families_csv.find(',', at);
    if (comma == std::string::npos) comma = o.families_csv.size();
    families.push_back(parse_family(o.families_csv.substr(at, comma - at)));
    at = comma + 1;
  }

  // Each manifest becomes one dataset; probes get a fixed 80/20 split.
  std::vector<TensorDataset> tensor_store;
  tensor_store.reserve(o.manifests.size() * 2);
  std::vector<DatasetRef> refs;
  for (const std::string& mpath : o.manifests) {
    Dataset ds = load_manifest_resolved(mpath);
    ds.taxonomy.validate();
    SplitResult split = split_dataset(ds, {0.8, 0.2, 0.0}, derive_seed(seed, "search/probe-split"));
    DatasetRef ref;
    ref.id = stem_of(mpath);
    ref.num_classes = ds.taxonomy.size();
    tensor_store.push_back(load_tensor_dataset(split.train, side));
    ref.train = &tensor_store.back();
    tensor_store.push_back(load_tensor_dataset(split.val, side));
    ref.val = &tensor_store.back();
    refs.push_back(std::move(ref));
  }

  fs::path out_dir(o.common.out_dir);
  fs::create_directories(out_dir);

  // Resume: completed probe scores keyed (family, genes, dataset) are reused
  // instead of retrained; seeds are derived, so replayed scores are exact.
  std::map<std::string, double> cache;
  fs::path log_path = out_dir / "trial_log.json";
  if (o.resume && fs::exists(log_path)) {
    std::ifstream in(log_path);
    json old = json::parse(in);
    for (const json& t : old.at("trials"))
      cache[t.at("family").get<std::string>() + "|" + t.at("genes").get<std::string>() + "|" +
            t.at("dataset").get<std::string>()] = t.at("score").get<double>();
    for (const json& t : old.at("score_table"))
      cache[t.at("family").get<std::string>() + "|" + t.at("genes").get<std::string>() + "|" +
            t.at("dataset").get<std::string>()] = t.at("score").get<double>();
  }
  TrialScorer probe = make_probe_scorer(sc);
  size_t cache_hits = 0;
  TrialScorer scorer = [&](const Genotype& g, const DatasetRef& ds, uint64_t s) {
    std::string key = family_name(g.family) + "|" + genotype_key(g) + "|" + ds.id;
    if (auto it = cache.find(key); it != cache.end()) {
      ++cache_hits;
      return it->second;
    }
    return probe(g, ds, s);
  };

  SelectResult result = select_optimal(families, refs, sc, scorer);

  write_text_file(log_path.string(), trial_log_json(result, seed));
  json selected = json::object();
  for (const auto& [family, sel] : result.by_family)
    selected[family] = {{"genes", genotype_key(sel.best)},
                        {"branch", sel.branch},
                        {"mean_score", sel.mean_score}};
  write_text_file((out_dir / "selected.json").string(),
                  json({{"selections", selected}}).dump(2) + "\n");

  finish_run("search", out_dir, seed, {"trial_log.json", "selected.json"});
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "search: " << result.trials.size() << " trials";
  if (cache_hits) std::cout << " (" << cache_hits << " resumed)";
  for (const auto& [family, sel] : result.by_family)
    std::cout << "; " << family << " -> " << genotype_key(sel.best) << " [" << sel.branch << "]";
  std::cout << "\n";
}

// ------------------------------------------------------------------ train

struct TrainOpts {
  CommonOpts common;
  std::string train_manifest, val_manifest;
  std::string genotype_key_str;
  std::string objective = "cce";
  std::string strictness = "text_iff";
  std::string name = "model";
  int head_classes = -1;
  TrainConfig tc;
  bool epochs_set = false, batch_set = false, lr_set = false, momentum_set = false,
       side_set = false;
};

void run_train(TrainOpts& o) {
  KeyValueConfig cfg = o.common.config();
  uint64_t seed = o.common.final_seed(cfg);

  TrainConfig tc = o.tc;
  if (!o.epochs_set) tc.epochs = static_cast<int>(cfg.integer("train.epochs", 64));
  if (!o.batch_set) tc.batch_size = static_cast<int>(cfg.integer("train.batch_size", 32));
  if (!o.lr_set) tc.learning_rate = cfg.real("train.learning_rate", 0.01);
  if (!o.momentum_set) tc.momentum = cfg.real("train.momentum", 0.9);
  if (!o.side_set) tc.input_side = static_cast<int>(cfg.integer("train.input_side", 64));
  tc.seed = seed;
  tc.validate();

  ObjectiveKind objective = parse_objective(o.objective);
  NmwStrictness strictness = parse_strictness(o.strictness);
  Genotype g = parse_genotype_key(o.genotype_key_str);

  Dataset train_ds = load_manifest_resolved(o.train_manifest);
  Dataset val_ds = load_manifest_resolved(o.val_manifest);
  train_ds.taxonomy.validate();
  if (!(train_ds.taxonomy == val_ds.taxonomy))
    throw std::runtime_error("train/val manifests disagree on the taxonomy");

  const int C = train_ds.taxonomy.size();
  int head = o.head_classes > 0 ? o.head_classes
                                : (objective == ObjectiveKind::CCE ? C : C + 1);
  // Objective/head compatibility is checked before any pixels load.
  if (objective != ObjectiveKind::CCE && head != C + 1)
    throw std::runtime_error(objective_name(objective) + " requires head_classes = " +
                             std::to_string(C + 1) + " (C+1 with the unknown class), got " +
                             std::to_string(head));
  if (objective == ObjectiveKind::CCE && head < C)
    throw std::runtime_error("cce requires head_classes >= " + std::to_string(C) + ", got " +
                             std::to_string(head));

  TensorDataset train_t = load_tensor_dataset(train_ds, tc.input_side);
  TensorDataset val_t = load_tensor_dataset(val_ds, tc.input_side);

  Model model = realize(g, head, derive_seed(seed, "realize/" + o.name), tc.input_side);
  TrainResult result = train_model(model, train_t, val_t, objective, tc, strictness);

  fs::path out_dir(o.common.out_dir);
  fs::create_directories(out_dir);
  std::string weights_name = o.name + ".cwnn";
  std::string history_name = o.name + "_history.csv";
  save_weights(model, (out_dir / weights_name).string());
  write_text_file((out_dir / history_name).string(), history_csv(result.history));

  finish_run("train", out_dir, seed, {weights_name, history_name});
  std::printf("train: %s %s, %d epochs -> val accuracy %.4f, nmw %.4f\n",
              genotype_key(g).c_str(), objective_name(objective).c_str(), tc.epochs,
              result.final_accuracy, result.final_nmw);
}

// --------------------------------------------------------------- evaluate

struct EvaluateOpts {
  CommonOpts common;
  std::string manifest;
  std::string taxonomy_manifest;
  std::vector<std::string> weight_files;
  std::vector<std::string> budget_kv;  // cat=count
  int input_side = -1;
  bool strict_budget = false;
};

void run_evaluate(EvaluateOpts& o) {
  KeyValueConfig cfg = o.common.config();
  uint64_t seed = o.common.final_seed(cfg);
  int side = o.input_side > 0 ? o.input_side : static_cast<int>(cfg.integer("train.input_side", 64));

  Dataset ds = load_manifest_resolved(o.manifest);
  if (!o.taxonomy_manifest.empty()) {
    // A small test split may miss whole categories; label numbering must
    // come from the manifest the models were trained on.
    Taxonomy ref = load_manifest(o.taxonomy_manifest).taxonomy;
    for (const Sample& s : ds.samples) {
      int idx = ref.index_of(s.category);
      if (idx < 0 || ref.group_of(idx) != s.group)
        throw std::runtime_error("category '" + s.category + "' in " + o.manifest +
                                 " is missing from or conflicts with the taxonomy manifest " +
                                 o.taxonomy_manifest);
    }
    ds.taxonomy = std::move(ref);
  }
  ds.taxonomy.validate();
  const Taxonomy& tax = ds.taxonomy;
  const int C = tax.size();
  TensorDataset test = load_tensor_dataset(ds, side);

  // Budget totals: flags, else config budget.<cat>=N, else the test set's
  // own truth counts (the field operator knows the planted counts).
  std::map<int, long long> totals;
  std::map<std::string, long long> named = cfg.prefixed_counts("budget.");
  for (const std::string& kv : o.budget_kv) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--budget expects category=count, got '" + kv + "'");
    named[kv.substr(0, eq)] = std::stoll(kv.substr(eq + 1));
  }
  if (named.empty()) {
    for (int label : test.labels)
      if (tax.is_crop(label)) ++totals[label];
  } else {
    for (const auto& [name, count] : named) {
      int idx = tax.index_of(name);
      if (idx < 0 || !tax.is_crop(idx))
        throw std::runtime_error("budget category '" + name + "' is not a crop in the manifest");
      totals[idx] = count;
    }
  }

  fs::path out_dir(o.common.out_dir);
  fs::create_directories(out_dir);
  std::vector<std::string> artifacts;

  std::vector<LabelVector> votes;
  json per_model = json::array();
  int best_idx = -1;
  double best_acc = -1;
  std::vector<EvalReport> reports;
  for (size_t k = 0; k < o.weight_files.size(); ++k) {
    Model m = load_weights(o.weight_files[k]);
    if (m.head_classes != C && m.head_classes != C + 1)
      throw std::runtime_error("model " + o.weight_files[k] + " has head " +
                               std::to_string(m.head_classes) + "; manifest taxonomy needs " +
                               std::to_string(C) + " or " + std::to_string(C + 1));
    if (m.input_side != side)
      throw std::runtime_error("model " + o.weight_files[k] + " expects input side " +
                               std::to_string(m.input_side) + ", evaluating at " +
                               std::to_string(side));
    LabelVector preds = predict(m, test);
    EvalReport r = evaluate_predictions(test.labels, preds, tax);
    reports.push_back(r);
    std::string report_name = "report_" + stem_of(o.weight_files[k]) + ".json";
    write_text_file((out_dir / report_name).string(), eval_report_json(r, tax));
    artifacts.push_back(report_name);
    per_model.push_back({{"model", stem_of(o.weight_files[k])},
                         {"genes", genotype_key(m.genotype)},
                         {"accuracy", r.accuracy},
                         {"report", report_name}});
    if (r.accuracy > best_acc) {
      best_acc = r.accuracy;
      best_idx = static_cast<int>(k);
    }
    votes.push_back(std::move(preds));
  }

  EnsemblePolicy policy{o.strict_budget};
  std::vector<EnsembleDecision> decisions = ensemble_run(votes, tax, totals, policy);
  LabelVector ensemble_preds;
  ensemble_preds.reserve(decisions.size());
  for (const EnsembleDecision& d : decisions) ensemble_preds.push_back(d.category);
  EvalReport ensemble_report = evaluate_predictions(test.labels, ensemble_preds, tax);
  write_text_file((out_dir / "ensemble_report.json").string(),
                  eval_report_json(ensemble_report, tax));
  write_text_file((out_dir / "decisions.json").string(), decisions_json(decisions));
  artifacts.push_back("ensemble_report.json");
  artifacts.push_back("decisions.json");

  // Error-percentage summary over best and worst sub-model plus ensemble.
  auto percentages = [](const EvalReport& r) {
    double n = static_cast<double>(r.n_samples);
    return json{{"moderate", 100.0 * r.moderate / n},
                {"minor", 100.0 * r.minor / n},
                {"considerable", 100.0 * r.considerable / n},
                {"dangerous", 100.0 * r.dangerous / n}};
  };
  int worst_idx = 0;
  for (size_t k = 1; k < reports.size(); ++k)
    if (reports[k].accuracy < reports[worst_idx].accuracy) worst_idx = static_cast<int>(k);
  json summary;
  summary["models"] = per_model;
  summary["best"] = {{"model", stem_of(o.weight_files[best_idx])},
                     {"accuracy", best_acc},
                     {"error_percent", percentages(reports[best_idx])}};
  summary["worst"] = {{"model", stem_of(o.weight_files[worst_idx])},
                      {"accuracy", reports[worst_idx].accuracy},
                      {"error_percent", percentages(reports[worst_idx])}};
  summary["ensemble"] = {{"accuracy", ensemble_report.accuracy},
                         {"error_percent", percentages(ensemble_report)}};
  write_text_file((out_dir / "summary.json").string(), summary.dump(2) + "\n");
  artifacts.push_back("summary.json");

  finish_run("evaluate", out_dir, seed, artifacts);
  std::printf("evaluate: best sub-model accuracy %.4f, ensemble accuracy %.4f, dangerous %lld\n",
              best_acc, ensemble_report.accuracy, ensemble_report.dangerous);
}

// --------------------------------------------------------------- gen-field

struct GenFieldOpts {
  CommonOpts common;
  int count = 1;
  FieldSpec spec;
};

void run_gen_field(GenFieldOpts& o) {
  KeyValueConfig cfg = o.common.config();
  uint64_t seed = o.common.final_seed(cfg);

  fs::path out_dir(o.common.out_dir);
  fs::create_directories(out_dir);
  json truth = json::array();
  std::vector<std::string> artifacts;
  char name[32];
  for (int i = 0; i < o.count; ++i) {
    FieldSpec spec = o.spec;
    spec.seed = derive_seed(seed, "field/" + std::to_string(i));
    FieldImage field = gen_synthetic_field(spec);
    std::snprintf(name, sizeof name, "field_%03d.png", i);
    write_png((out_dir / name).string(), field.image);
    artifacts.push_back(name);
    json blobs = json::array();
    for (const TruthBlob& b : field.truth)
      blobs.push_back({{"kind", b.kind},
                       {"x", b.bbox.x},
                       {"y", b.bbox.y},
                       {"w", b.bbox.w},
                       {"h", b.bbox.h}});
    truth.push_back({{"image", name}, {"blobs", blobs}});
  }
  write_text_file((out_dir / "truth.json").string(), json({{"fields", truth}}).dump(2) + "\n");
  artifacts.push_back("truth.json");
  finish_run("gen-field", out_dir, seed, artifacts);
  std::cout << "gen-field: " << o.count << " field images -> " << out_dir.string() << "\n";
}

// -------------------------------------------------------------- gen-plants

struct GenPlantsOpts {
  CommonOpts common;
  PlantsSpec spec;
};

void run_gen_plants(GenPlantsOpts& o) {
  KeyValueConfig cfg = o.common.config();
  uint64_t seed = o.common.final_seed(cfg);
  PlantsSpec spec = o.spec;
  spec.seed = seed;

  Dataset ds = gen_synthetic_plants(spec, o.common.out_dir);

  fs::path out_dir(o.common.out_dir);
  std::vector<std::string> artifacts = {"manifest.csv"};
  for (const Sample& s : ds.samples) artifacts.push_back(s.image_path);
  finish_run("gen-plants", out_dir, seed, artifacts);
  std::cout << "gen-plants: " << ds.size() << " images across " << ds.taxonomy.size()
            << " categories -> " << out_dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crop/weed classification pipeline"};
  app.require_subcommand(1);

  SegmentOpts seg;
  CLI::App* c = app.add_subcommand("segment", "segment field images into plant cut-outs");
  add_common(c, seg.common);
  c->add_option("--input", seg.input_dir, "directory of field images")->required();
  c->add_option("--h-lo", seg.params.h_range.lo, "hue window, open lower bound");
  c->add_option("--h-hi", seg.params.h_range.hi, "hue window, closed upper bound");
  c->add_option("--s-lo", seg.params.s_range.lo, "saturation lower bound");
  c->add_option("--s-hi", seg.params.s_range.hi, "saturation upper bound");
  c->add_option("--v-lo", seg.params.v_range.lo, "value lower bound");
  c->add_option("--v-hi", seg.params.v_range.hi, "value upper bound");
  c->add_option("--t-size", seg.params.t_size, "min bbox area fraction");
  c->add_option("--t-ratio", seg.params.t_ratio, "min side ratio");
  c->add_option("--kernel", seg.params.open_kernel_side, "opening kernel side");
  c->callback([&] { run_segment(seg); });

  SampleOpts smp;
  c = app.add_subcommand("sample", "build the sampled data set (SD) from a complete one (CD)");
  add_common(c, smp.common);
  c->add_option("--manifest", smp.manifest, "CD manifest")->required();
  c->add_option("--alpha", smp.alpha, "frequency weight (default 0.7)");
  c->add_option("--beta", smp.beta, "class-count weight (default 0.3)");
  c->callback([&] { run_sample(smp); });

  SplitOpts spl;
  c = app.add_subcommand("split", "stratified train/val/test split");
  add_common(c, spl.common);
  c->add_option("--manifest", spl.manifest, "input manifest")->required();
  c->add_option("--train", spl.train, "train fraction");
  c->add_option("--val", spl.val, "val fraction");
  c->add_option("--test", spl.test, "test fraction");
  c->callback([&] { run_split(spl); });

  SearchOpts sea;
  c = app.add_subcommand("search", "architecture trial search and selection");
  add_common(c, sea.common);
  c->add_option("--manifest", sea.manifests, "dataset manifest (repeatable)")->required();
  c->add_option("--families", sea.families_csv, "comma list of families");
  c->add_option("--trials", sea.trials, "trials per dataset");
  c->add_option("--top-k", sea.top_k, "trials kept per dataset");
  c->add_option("--probe-epochs", sea.probe_epochs, "epochs per probe training");
  c->add_option("--input-side", sea.input_side, "model input side");
  c->add_flag("--resume", sea.resume, "reuse scores from an existing trial log");
  c->callback([&] { run_search(sea); });

  TrainOpts trn;
  c = app.add_subcommand("train", "train one model");
  add_common(c, trn.common);
  c->add_option("--train-manifest", trn.train_manifest, "training manifest")->required();
  c->add_option("--val-manifest", trn.val_manifest, "validation manifest")->required();
  c->add_option("--genotype", trn.genotype_key_str, "canonical genotype key")->required();
  c->add_option("--objective", trn.objective, "cce | nmw | dm");
  c->add_option("--strictness", trn.strictness, "NMW reading: text_iff | symmetric");
  c->add_option("--name", trn.name, "output basename (default 'model')");
  c->add_option("--head-classes", trn.head_classes, "output classes (default per objective)");
  c->add_option("--epochs", trn.tc.epochs)->each([&](const std::string&) { trn.epochs_set = true; });
  c->add_option("--batch", trn.tc.batch_size)->each([&](const std::string&) {
    trn.batch_set = true;
  });
  c->add_option("--lr", trn.tc.learning_rate)->each([&](const std::string&) { trn.lr_set = true; });
  c->add_option("--momentum", trn.tc.momentum)->each([&](const std::string&) {
    trn.momentum_set = true;
  });
  c->add_option("--input-side", trn.tc.input_side)->each([&](const std::string&) {
    trn.side_set = true;
  });
  c->callback([&] { run_train(trn); });

  EvaluateOpts evl;
  c = app.add_subcommand("evaluate", "evaluate models and their ensemble on a test manifest");
  add_common(c, evl.common);
  c->add_option("--manifest", evl.manifest, "test manifest")->required();
  c->add_option("--taxonomy", evl.taxonomy_manifest,
                "manifest that fixes category numbering (default: the test manifest)");
  c->add_option("--weights", evl.weight_files, "weight file (repeatable)")->required();
  c->add_option("--budget", evl.budget_kv, "crop budget category=count (repeatable)");
  c->add_option("--input-side", evl.input_side, "model input side");
  c->add_flag("--strict-budget", evl.strict_budget,
              "subject unanimous crop votes to the budget gap too");
  c->callback([&] { run_evaluate(evl); });

  GenFieldOpts gf;
  c = app.add_subcommand("gen-field", "generate synthetic field images with ground truth");
  add_common(c, gf.common);
  c->add_option("--count", gf.count, "number of field images");
  c->add_option("--width", gf.spec.width);
  c->add_option("--height", gf.spec.height);
  c->add_option("--blobs", gf.spec.n_blobs, "plant blobs per image");
  c->add_option("--specks", gf.spec.n_specks, "sub-t_size distractors per image");
  c->add_option("--bands", gf.spec.n_bands, "sub-t_ratio distractors per image");
  c->callback([&] { run_gen_field(gf); });

  GenPlantsOpts gp;
  c = app.add_subcommand("gen-plants", "generate the synthetic 4-class plant set");
  add_common(c, gp.common);
  c->add_option("--per-category", gp.spec.per_category, "images per category");
  c->add_option("--ambiguous", gp.spec.ambiguous_fraction,
                "fraction rendered as crop/weed morph shapes");
  c->add_option("--side", gp.spec.side, "image side in pixels");
  c->callback([&] { run_gen_plants(gp); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json({{"error", e.what()}}).dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json({{"error", e.what()}}).dump() << "\n";
    return 1;
  }
  return 0;
}
