#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "signbench/error.hpp"

namespace signbench {

enum class DatasetKind { ARSL2018, AASL, SYNTHETIC };

inline const char* dataset_kind_name(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::ARSL2018: return "ARSL2018";
    case DatasetKind::AASL: return "AASL";
    case DatasetKind::SYNTHETIC: return "SYNTHETIC";
  }
  return "?";
}

inline DatasetKind dataset_kind_from_name(const std::string& name) {
  if (name == "ARSL2018") return DatasetKind::ARSL2018;
  if (name == "AASL") return DatasetKind::AASL;
  if (name == "SYNTHETIC") return DatasetKind::SYNTHETIC;
  raise(ErrorCode::ConfigError, "unknown dataset kind '" + name + "'");
}

// Expected class counts for the two published datasets. Synthetic datasets
// take whatever the caller provides (>= 2 classes).
inline int expected_class_count(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::ARSL2018: return 32;
    case DatasetKind::AASL: return 31;
    case DatasetKind::SYNTHETIC: return -1;
  }
  return -1;
}

// Bijection between class names and contiguous indices [0, C). Indices are
// assigned after a lexicographic sort of the names so the mapping does not
// depend on filesystem enumeration order.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(DatasetKind kind, std::vector<std::string> sorted_names)
      : kind_(kind), names_(std::move(sorted_names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) index_[names_[i]] = static_cast<int>(i);
  }

  DatasetKind kind() const { return kind_; }
  int num_classes() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name_of(int index) const { return names_.at(static_cast<std::size_t>(index)); }

  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) {
      raise(ErrorCode::DatasetKeyError, "class name not in label map: '" + name + "'");
    }
    return it->second;
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

 private:
  DatasetKind kind_ = DatasetKind::SYNTHETIC;
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
};

// Builds the label map from class names (directory names for on-disk datasets,
// caller-provided for synthetic ones). Names are sorted before indices are
// assigned; duplicates and class-count mismatches are rejected.
inline LabelMap build_label_map(DatasetKind kind, std::vector<std::string> class_names) {
  std::sort(class_names.begin(), class_names.end());
  for (std::size_t i = 1; i < class_names.size(); ++i) {
    if (class_names[i] == class_names[i - 1]) {
      raise(ErrorCode::DuplicateClass, "duplicate class name '" + class_names[i] + "'");
    }
  }
  const int expected = expected_class_count(kind);
  const int found = static_cast<int>(class_names.size());
  if (expected > 0 && found != expected) {
    raise(ErrorCode::ClassCountMismatch,
          std::string(dataset_kind_name(kind)) + " expects " + std::to_string(expected) +
              " classes, found " + std::to_string(found));
  }
  if (expected < 0 && found < 2) {
    raise(ErrorCode::ClassCountMismatch,
          "synthetic datasets need at least 2 classes, found " + std::to_string(found));
  }
  return LabelMap(kind, std::move(class_names));
}

}  // namespace signbench
