#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "signbench/error.hpp"
#include "signbench/manifest.hpp"
#include "signbench/preprocess.hpp"
#include "signbench/rng.hpp"

namespace signbench {

// Lower median of the class counts (the order statistic at (n-1)/2), so the
// balancing target is always an attainable integer count.
inline std::size_t median_class_count(const std::vector<std::size_t>& counts) {
  std::vector<std::size_t> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  return sorted[(sorted.size() - 1) / 2];
}

// Equalizes every class to the target count.
//   UNDER  removes surplus samples by seeded uniform choice without replacement.
//   OVER   appends seeded uniform-with-replacement duplicates (duplicate_of set).
//   HYBRID_TO_MEDIAN under-samples classes above the target and over-samples
//          classes below it; the default target is the median class count.
// Survivors keep their original relative order; duplicates are appended after
// each class's originals. NONE returns the manifest unchanged.
inline DatasetManifest balance_classes(const DatasetManifest& manifest,
                                       BalanceStrategy strategy,
                                       std::optional<std::size_t> target_count,
                                       std::uint64_t seed) {
  if (manifest.samples.empty()) raise(ErrorCode::EmptyDataset, "manifest has no samples");
  for (std::size_t c = 0; c < manifest.class_counts.size(); ++c) {
    if (manifest.class_counts[c] == 0) {
      raise(ErrorCode::EmptyClass, "class '" + manifest.label_map.name_of(static_cast<int>(c)) +
                                       "' has no samples");
    }
  }
  if (target_count && *target_count < 1) {
    raise(ErrorCode::ConfigError, "balance target must be >= 1");
  }

  if (strategy == BalanceStrategy::NONE) return manifest;

  const auto& counts = manifest.class_counts;
  const std::size_t min_count = *std::min_element(counts.begin(), counts.end());
  const std::size_t max_count = *std::max_element(counts.begin(), counts.end());
  const std::size_t target = target_count ? *target_count : median_class_count(counts);

  if (strategy == BalanceStrategy::UNDER && target > min_count) {
    raise(ErrorCode::InfeasibleUnderSampling,
          "target " + std::to_string(target) + " exceeds smallest class count " +
              std::to_string(min_count));
  }
  if (strategy == BalanceStrategy::OVER && target < max_count) {
    raise(ErrorCode::InfeasibleOverSampling,
          "target " + std::to_string(target) + " is below largest class count " +
              std::to_string(max_count));
  }

  // group manifest positions by class, preserving manifest order
  const int num_classes = manifest.label_map.num_classes();
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    by_class[static_cast<std::size_t>(manifest.samples[i].class_index)].push_back(i);
  }

  Rng rng(seed);
  DatasetManifest out;
  out.kind = manifest.kind;
  out.label_map = manifest.label_map;
  out.skipped = manifest.skipped;

  bool changed = false;
  for (int ci = 0; ci < num_classes; ++ci) {
    const auto& members = by_class[static_cast<std::size_t>(ci)];
    const std::size_t n = members.size();
    if (n > target) {
      // keep a uniform subset of size target, original order preserved
      std::vector<std::size_t> positions(n);
      for (std::size_t i = 0; i < n; ++i) positions[i] = i;
      rng.shuffle(positions);
      positions.resize(target);
      std::sort(positions.begin(), positions.end());
      for (std::size_t p : positions) out.samples.push_back(manifest.samples[members[p]]);
      changed = true;
    } else {
      for (std::size_t m : members) out.samples.push_back(manifest.samples[m]);
      for (std::size_t k = n; k < target; ++k) {
        const std::size_t pick = static_cast<std::size_t>(rng.uniform_int(n));
        SampleRef dup = manifest.samples[members[pick]];
        dup.duplicate_of = dup.path;
        out.samples.push_back(std::move(dup));
        changed = true;
      }
    }
  }

  out.class_counts = tally_class_counts(out.samples, num_classes);
  out.checksum = changed ? manifest_checksum(out.samples) : manifest.checksum;
  return out;
}

}  // namespace signbench
