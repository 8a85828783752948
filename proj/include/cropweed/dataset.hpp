#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cropweed {

enum class Group { Crop, Weed, Unknown };

std::string group_name(Group g);
Group parse_group(const std::string& s);

// The class universe. Named categories keep their first-appearance order;
// the synthetic unknown class always sits last, at index size().
class Taxonomy {
 public:
  Taxonomy() = default;
  Taxonomy(const std::vector<std::string>& crops, const std::vector<std::string>& weeds);

  // Registers a category on first sight, errors if it reappears in a
  // different group.
  void add(const std::string& name, Group group);

  int size() const { return static_cast<int>(names_.size()); }
  int unknown_index() const { return size(); }
  int index_of(const std::string& name) const;  // -1 when absent
  const std::string& name_of(int index) const;  // "unknown" at unknown_index
  Group group_of(int index) const;
  bool is_crop(int index) const { return group_of(index) == Group::Crop; }
  bool is_weed(int index) const { return group_of(index) == Group::Weed; }

  std::vector<std::string> crops() const;
  std::vector<std::string> weeds() const;
  std::vector<int> crop_indices() const;
  std::vector<int> weed_indices() const;

  // q >= 1 and p >= 1
  void validate() const;

  bool operator==(const Taxonomy&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<Group> groups_;
};

struct Sample {
  std::string image_path;
  std::string category;
  Group group = Group::Crop;
};

enum class DatasetKind { CD, SD };

struct Dataset {
  std::vector<Sample> samples;
  Taxonomy taxonomy;
  DatasetKind kind = DatasetKind::CD;

  size_t size() const { return samples.size(); }
  int label_of(size_t i) const { return taxonomy.index_of(samples[i].category); }
};

// CSV with header `path,category,group`.
Dataset load_manifest(const std::string& path);
void write_manifest(const std::string& path, const Dataset& ds);

// Rewrites relative sample paths against base_dir. Manifests carry paths
// relative to their own directory so they stay byte-identical across
// output roots; call this before reading pixels.
void resolve_paths(Dataset& ds, const std::string& base_dir);

// load_manifest + resolve_paths against the manifest's directory.
Dataset load_manifest_resolved(const std::string& path);

struct SampleRatePlan {
  double alpha = 0.7;
  double beta = 0.3;
  std::map<std::string, double> rates;  // weed category -> k in [0,1]
};

// k_i = alpha * Num_weed_i / Num_weed + beta / Cls_weed, clamped to [0,1].
SampleRatePlan compute_sample_rates(const Dataset& ds, double alpha = 0.7, double beta = 0.3);

// Keeps every crop sample and round(k_i * N_i) seeded draws per weed
// category, without replacement. Output is weed part then crop part, each
// in original order.
Dataset build_sampled_dataset(const Dataset& ds, const SampleRatePlan& plan, uint64_t seed);

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct SplitResult {
  Dataset train;
  Dataset val;
  Dataset test;
  std::vector<std::string> warnings;
};

// Stratified per category with largest-remainder rounding. A category with
// fewer samples than non-empty partitions goes entirely to train.
SplitResult split_dataset(const Dataset& ds, const SplitFractions& fractions, uint64_t seed);

struct ClassStats {
  std::vector<std::pair<std::string, long long>> per_category;  // taxonomy order
  long long total_crops = 0;
  long long total_weeds = 0;
  double weed_crop_ratio = 0.0;  // +inf when weeds exist but crops do not
};

ClassStats class_stats(const Dataset& ds);

}  // namespace cropweed
