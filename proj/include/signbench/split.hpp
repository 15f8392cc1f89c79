#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

#include "signbench/error.hpp"
#include "signbench/manifest.hpp"
#include "signbench/preprocess.hpp"
#include "signbench/rng.hpp"

namespace signbench {

// Stratified train/val/test partition. Entries are manifest positions, sorted
// ascending within each split.
struct SplitAssignment {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
  SplitRatios ratios;
  std::uint64_t seed = 0;

  std::size_t total() const { return train.size() + val.size() + test.size(); }
};

// Per class: seeded shuffle, then the first floor(r_train * n) samples go to
// train, the next floor(r_val * n) to val, and the remainder to test. The
// floor-then-remainder rule keeps every class at the global proportions up to
// integer rounding.
inline SplitAssignment split_dataset(const DatasetManifest& manifest, SplitRatios ratios,
                                     std::uint64_t seed) {
  if (ratios.train <= 0 || ratios.val <= 0 || ratios.test <= 0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    raise(ErrorCode::ConfigError, "split ratios must be positive and sum to 1.0");
  }
  if (manifest.samples.empty()) raise(ErrorCode::EmptyDataset, "manifest has no samples");

  const int num_classes = manifest.label_map.num_classes();
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    by_class[static_cast<std::size_t>(manifest.samples[i].class_index)].push_back(i);
  }

  SplitAssignment out;
  out.ratios = ratios;
  out.seed = seed;

  Rng rng(seed);
  for (int ci = 0; ci < num_classes; ++ci) {
    auto members = by_class[static_cast<std::size_t>(ci)];
    if (members.size() < 3) {
      raise(ErrorCode::StratificationError,
            "class '" + manifest.label_map.name_of(ci) + "' has " +
                std::to_string(members.size()) + " samples; need >= 3 to fill all splits");
    }
    rng.shuffle(members);
    const std::size_t n = members.size();
    const auto n_train = static_cast<std::size_t>(std::floor(ratios.train * static_cast<double>(n)));
    const auto n_val = static_cast<std::size_t>(std::floor(ratios.val * static_cast<double>(n)));
    out.train.insert(out.train.end(), members.begin(), members.begin() + n_train);
    out.val.insert(out.val.end(), members.begin() + n_train, members.begin() + n_train + n_val);
    out.test.insert(out.test.end(), members.begin() + n_train + n_val, members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

inline nlohmann::ordered_json split_to_json(const SplitAssignment& split,
                                            const DatasetManifest& manifest) {
  auto paths_of = [&manifest](const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(manifest.samples[i].path);
    return out;
  };
  nlohmann::ordered_json j;
  j["seed"] = split.seed;
  j["ratios"] = {{"train", split.ratios.train}, {"val", split.ratios.val}, {"test", split.ratios.test}};
  j["train"] = paths_of(split.train);
  j["val"] = paths_of(split.val);
  j["test"] = paths_of(split.test);
  return j;
}

// Inverse of split_to_json. Duplicate paths (from oversampling) are matched to
// manifest positions in order of appearance; copies of the same image are
// interchangeable, so this reproduces an equivalent assignment.
inline SplitAssignment split_from_json(const nlohmann::json& j, const DatasetManifest& manifest) {
  try {
    std::map<std::string, std::vector<std::size_t>> pool;
    for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
      pool[manifest.samples[i].path].push_back(i);
    }
    std::map<std::string, std::size_t> next;
    auto take = [&](const std::string& path) -> std::size_t {
      auto it = pool.find(path);
      if (it == pool.end() || next[path] >= it->second.size()) {
        raise(ErrorCode::ParseError, "split references unknown sample '" + path + "'");
      }
      return it->second[next[path]++];
    };

    SplitAssignment out;
    out.seed = j.at("seed").get<std::uint64_t>();
    out.ratios.train = j.at("ratios").at("train").get<double>();
    out.ratios.val = j.at("ratios").at("val").get<double>();
    out.ratios.test = j.at("ratios").at("test").get<double>();
    for (const auto& p : j.at("train")) out.train.push_back(take(p.get<std::string>()));
    for (const auto& p : j.at("val")) out.val.push_back(take(p.get<std::string>()));
    for (const auto& p : j.at("test")) out.test.push_back(take(p.get<std::string>()));
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, std::string("malformed split JSON: ") + e.what());
  }
}

inline void write_split(const SplitAssignment& split, const DatasetManifest& manifest,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out << split_to_json(split, manifest).dump(2) << "\n";
}

inline SplitAssignment read_split(const std::filesystem::path& path,
                                  const DatasetManifest& manifest) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return split_from_json(j, manifest);
}

}  // namespace signbench
