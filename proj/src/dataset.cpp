#include "cropweed/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cropweed/rng.hpp"

namespace cropweed {

std::string group_name(Group g) {
  switch (g) {
    case Group::Crop: return "crop";
    case Group::Weed: return "weed";
    default: return "unknown";
  }
}

Group parse_group(const std::string& s) {
  if (s == "crop") return Group::Crop;
  if (s == "weed") return Group::Weed;
  if (s == "unknown") return Group::Unknown;
  throw std::runtime_error("unknown group '" + s + "' (expected crop or weed)");
}

Taxonomy::Taxonomy(const std::vector<std::string>& crops, const std::vector<std::string>& weeds) {
  for (const auto& c : crops) add(c, Group::Crop);
  for (const auto& w : weeds) add(w, Group::Weed);
}

void Taxonomy::add(const std::string& name, Group group) {
  if (group == Group::Unknown) throw std::runtime_error("taxonomy: cannot add the unknown class");
  int idx = index_of(name);
  if (idx >= 0) {
    if (groups_[idx] != group)
      throw std::runtime_error("taxonomy: category '" + name + "' listed as both " +
                               group_name(groups_[idx]) + " and " + group_name(group));
    return;
  }
  names_.push_back(name);
  groups_.push_back(group);
}

int Taxonomy::index_of(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

const std::string& Taxonomy::name_of(int index) const {
  static const std::string kUnknown = "unknown";
  if (index == unknown_index()) return kUnknown;
  if (index < 0 || index > size()) throw std::out_of_range("taxonomy: bad category index");
  return names_[index];
}

Group Taxonomy::group_of(int index) const {
  if (index == unknown_index()) return Group::Unknown;
  if (index < 0 || index > size()) throw std::out_of_range("taxonomy: bad category index");
  return groups_[index];
}

std::vector<std::string> Taxonomy::crops() const {
  std::vector<std::string> out;
  for (size_t i = 0; i < names_.size(); ++i)
    if (groups_[i] == Group::Crop) out.push_back(names_[i]);
  return out;
}

std::vector<std::string> Taxonomy::weeds() const {
  std::vector<std::string> out;
  for (size_t i = 0; i < names_.size(); ++i)
    if (groups_[i] == Group::Weed) out.push_back(names_[i]);
  return out;
}

std::vector<int> Taxonomy::crop_indices() const {
  std::vector<int> out;
  for (size_t i = 0; i < groups_.size(); ++i)
    if (groups_[i] == Group::Crop) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Taxonomy::weed_indices() const {
  std::vector<int> out;
  for (size_t i = 0; i < groups_.size(); ++i)
    if (groups_[i] == Group::Weed) out.push_back(static_cast<int>(i));
  return out;
}

void Taxonomy::validate() const {
  if (crop_indices().empty()) throw std::runtime_error("taxonomy: needs at least one crop category");
  if (weed_indices().empty()) throw std::runtime_error("taxonomy: needs at least one weed category");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

Dataset load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path);
  Dataset ds;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "path,category,group")
        throw std::runtime_error("manifest: bad header in " + path +
                                 " (expected 'path,category,group')");
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3)
      throw std::runtime_error("manifest: malformed row " + std::to_string(lineno) + " in " + path);
    Group g;
    try {
      g = parse_group(fields[2]);
    } catch (const std::exception& e) {
      throw std::runtime_error("manifest: row " + std::to_string(lineno) + ": " + e.what());
    }
    if (g == Group::Unknown)
      throw std::runtime_error("manifest: row " + std::to_string(lineno) +
                               ": group must be crop or weed");
    try {
      ds.taxonomy.add(fields[1], g);
    } catch (const std::exception& e) {
      throw std::runtime_error("manifest: row " + std::to_string(lineno) + ": " + e.what());
    }
    ds.samples.push_back({fields[0], fields[1], g});
  }
  return ds;
}

void write_manifest(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("manifest: cannot write " + path);
  out << "path,category,group\n";
  for (const Sample& s : ds.samples)
    out << s.image_path << ',' << s.category << ',' << group_name(s.group) << '\n';
}

void resolve_paths(Dataset& ds, const std::string& base_dir) {
  for (Sample& s : ds.samples) {
    std::filesystem::path p(s.image_path);
    if (p.is_relative()) s.image_path = (std::filesystem::path(base_dir) / p).string();
  }
}

Dataset load_manifest_resolved(const std::string& path) {
  Dataset ds = load_manifest(path);
  resolve_paths(ds, std::filesystem::path(path).parent_path().string());
  return ds;
}

SampleRatePlan compute_sample_rates(const Dataset& ds, double alpha, double beta) {
  std::map<std::string, long long> weed_counts;
  long long num_weed = 0;
  for (const Sample& s : ds.samples) {
    if (s.group == Group::Weed) {
      ++weed_counts[s.category];
      ++num_weed;
    }
  }
  if (num_weed == 0) throw std::runtime_error("compute_sample_rates: dataset has no weed samples");
  SampleRatePlan plan;
  plan.alpha = alpha;
  plan.beta = beta;
  const double cls_weed = static_cast<double>(weed_counts.size());
  for (const auto& [name, count] : weed_counts) {
    double k = alpha * static_cast<double>(count) / static_cast<double>(num_weed) + beta / cls_weed;
    plan.rates[name] = std::clamp(k, 0.0, 1.0);
  }
  return plan;
}

Dataset build_sampled_dataset(const Dataset& ds, const SampleRatePlan& plan, uint64_t seed) {
  if (ds.kind != DatasetKind::CD)
    throw std::runtime_error("build_sampled_dataset: input must be the complete data set");

  // Indices per weed category, in manifest order.
  std::map<std::string, std::vector<size_t>> weed_idx;
  for (size_t i = 0; i < ds.samples.size(); ++i)
    if (ds.samples[i].group == Group::Weed) weed_idx[ds.samples[i].category].push_back(i);

  std::vector<size_t> kept;
  for (const std::string& cat : ds.taxonomy.weeds()) {
    auto it = weed_idx.find(cat);
    if (it == weed_idx.end()) continue;
    const auto& idx = it->second;
    double k = 1.0;
    if (auto r = plan.rates.find(cat); r != plan.rates.end()) k = r->second;
    size_t take = static_cast<size_t>(std::llround(k * static_cast<double>(idx.size())));
    take = std::min(take, idx.size());
    std::vector<size_t> pool = idx;
    Rng rng = make_rng(seed, "sample/" + cat);
    shuffle_vec(pool, rng);
    kept.insert(kept.end(), pool.begin(), pool.begin() + take);
  }
  std::sort(kept.begin(), kept.end());

  Dataset out;
  out.taxonomy = ds.taxonomy;
  out.kind = DatasetKind::SD;
  for (size_t i : kept) out.samples.push_back(ds.samples[i]);
  for (const Sample& s : ds.samples)
    if (s.group == Group::Crop) out.samples.push_back(s);
  return out;
}

SplitResult split_dataset(const Dataset& ds, const SplitFractions& fractions, uint64_t seed) {
  const double f[3] = {fractions.train, fractions.val, fractions.test};
  double sum = f[0] + f[1] + f[2];
  if (f[0] <= 0 || f[1] < 0 || f[2] < 0 || std::fabs(sum - 1.0) > 1e-9)
    throw std::runtime_error("split: fractions must be positive and sum to 1");

  int nonzero_parts = 0;
  for (double x : f)
    if (x > 0) ++nonzero_parts;

  SplitResult result;
  for (Dataset* d : {&result.train, &result.val, &result.test}) {
    d->taxonomy = ds.taxonomy;
    d->kind = ds.kind;
  }

  std::map<std::string, std::vector<size_t>> by_cat;
  for (size_t i = 0; i < ds.samples.size(); ++i) by_cat[ds.samples[i].category].push_back(i);

  std::vector<std::vector<size_t>> part_indices(3);
  for (int ci = 0; ci < ds.taxonomy.size(); ++ci) {
    const std::string& cat = ds.taxonomy.name_of(ci);
    auto it = by_cat.find(cat);
    if (it == by_cat.end()) continue;
    std::vector<size_t> idx = it->second;
    if (idx.size() < static_cast<size_t>(nonzero_parts)) {
      result.warnings.push_back("split: category '" + cat + "' has only " +
                                std::to_string(idx.size()) +
                                " samples; assigning all of them to train");
      part_indices[0].insert(part_indices[0].end(), idx.begin(), idx.end());
      continue;
    }
    Rng rng = make_rng(seed, "split/" + cat);
    shuffle_vec(idx, rng);

    // largest-remainder apportionment
    size_t n = idx.size();
    size_t base[3];
    double frac[3];
    size_t assigned = 0;
    for (int p = 0; p < 3; ++p) {
      double quota = static_cast<double>(n) * f[p];
      base[p] = static_cast<size_t>(quota);
      frac[p] = quota - static_cast<double>(base[p]);
      assigned += base[p];
    }
    int order[3] = {0, 1, 2};
    std::stable_sort(order, order + 3, [&](int a, int b) { return frac[a] > frac[b]; });
    for (size_t r = 0; r < n - assigned; ++r) ++base[order[r % 3]];

    size_t pos = 0;
    for (int p = 0; p < 3; ++p) {
      for (size_t k = 0; k < base[p]; ++k) part_indices[p].push_back(idx[pos++]);
    }
  }

  Dataset* outs[3] = {&result.train, &result.val, &result.test};
  for (int p = 0; p < 3; ++p) {
    std::sort(part_indices[p].begin(), part_indices[p].end());
    for (size_t i : part_indices[p]) outs[p]->samples.push_back(ds.samples[i]);
  }
  return result;
}

ClassStats class_stats(const Dataset& ds) {
  ClassStats stats;
  std::vector<long long> counts(ds.taxonomy.size(), 0);
  for (const Sample& s : ds.samples) {
    int idx = ds.taxonomy.index_of(s.category);
    if (idx >= 0) ++counts[idx];
    if (s.group == Group::Crop) ++stats.total_crops;
    else if (s.group == Group::Weed) ++stats.total_weeds;
  }
  for (int i = 0; i < ds.taxonomy.size(); ++i)
    stats.per_category.emplace_back(ds.taxonomy.name_of(i), counts[i]);
  if (stats.total_crops > 0)
    stats.weed_crop_ratio = static_cast<double>(stats.total_weeds) / stats.total_crops;
  else if (stats.total_weeds > 0)
    stats.weed_crop_ratio = std::numeric_limits<double>::infinity();
  return stats;
}

}  // namespace cropweed
