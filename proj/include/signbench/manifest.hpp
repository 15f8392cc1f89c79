#pragma once

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "signbench/error.hpp"
#include "signbench/image.hpp"
#include "signbench/image_codec.hpp"
#include "signbench/label_map.hpp"
#include "signbench/sha256.hpp"

namespace signbench {

// One catalogued image. `path` is usable as-is for loading; `rel_path` is the
// root-relative form that goes into the checksum so a dataset hashes the same
// wherever it sits on disk. `duplicate_of` is empty unless the sample was
// produced by oversampling.
struct SampleRef {
  std::string path;
  std::string rel_path;
  std::string class_name;
  int class_index = -1;
  std::string source_id;      // participant/camera tag when present, else empty
  std::string duplicate_of;   // path of the original for oversampled copies
  std::string content_hash;   // sha256 of the file bytes, filled at scan time

  bool is_duplicate() const { return !duplicate_of.empty(); }
};

struct DatasetManifest {
  DatasetKind kind = DatasetKind::SYNTHETIC;
  LabelMap label_map;
  std::vector<SampleRef> samples;          // lexicographic by path (duplicates appended per class)
  std::vector<std::size_t> class_counts;   // indexed by class_index
  std::string checksum;                    // lowercase hex
  std::vector<std::string> skipped;        // undecodable files found during scan

  std::size_t size() const { return samples.size(); }
};

inline std::string manifest_checksum(std::vector<SampleRef>& samples) {
  Sha256 hash;
  for (auto& s : samples) {
    if (s.content_hash.empty()) {
      const auto bytes = read_file_bytes(s.path);
      s.content_hash = sha256_hex(bytes.data(), bytes.size());
    }
    hash.update(s.rel_path);
    hash.update("\x1f", 1);
    hash.update(s.class_name);
    hash.update("\x1f", 1);
    hash.update(std::to_string(s.class_index));
    hash.update("\x1f", 1);
    hash.update(s.content_hash);
    hash.update("\n", 1);
  }
  return hash.hex_digest();
}

inline std::vector<std::size_t> tally_class_counts(const std::vector<SampleRef>& samples,
                                                   int num_classes) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (const auto& s : samples) {
    if (s.class_index < 0 || s.class_index >= num_classes) {
      raise(ErrorCode::LabelRangeError,
            "sample '" + s.path + "' has class index " + std::to_string(s.class_index));
    }
    ++counts[static_cast<std::size_t>(s.class_index)];
  }
  return counts;
}

// Walks <root>/<class_name>/<image_file>, decodes every file once, skips (and
// reports) undecodable ones, and produces a deterministic, checksummed
// manifest. Class names come from the immediate subdirectory names.
inline DatasetManifest scan_dataset(const std::filesystem::path& root, DatasetKind kind) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) {
    raise(ErrorCode::IoError, "dataset root is not a directory: " + root.string());
  }

  std::vector<std::string> class_names;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_names.push_back(entry.path().filename().string());
  }
  std::sort(class_names.begin(), class_names.end());
  LabelMap label_map = build_label_map(kind, class_names);

  DatasetManifest manifest;
  manifest.kind = kind;
  manifest.label_map = label_map;

  for (const auto& class_name : label_map.names()) {
    const fs::path class_dir = root / class_name;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(class_dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::size_t kept = 0;
    for (const auto& file : files) {
      const auto bytes = read_file_bytes(file);
      try {
        const RawImage img = decode_image(bytes, file.string());
        (void)img;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ImageDecodeError) throw;
        manifest.skipped.push_back(file.string());
        continue;
      }
      SampleRef ref;
      ref.path = file.string();
      ref.rel_path = (fs::path(class_name) / file.filename()).generic_string();
      ref.class_name = class_name;
      ref.class_index = label_map.index_of(class_name);
      ref.content_hash = sha256_hex(bytes.data(), bytes.size());
      manifest.samples.push_back(std::move(ref));
      ++kept;
    }
    if (kept == 0) {
      raise(ErrorCode::EmptyClass, "class '" + class_name + "' has no decodable images");
    }
  }

  if (manifest.samples.empty()) {
    raise(ErrorCode::EmptyDataset, "no samples found under " + root.string());
  }
  manifest.class_counts = tally_class_counts(manifest.samples, label_map.num_classes());
  manifest.checksum = manifest_checksum(manifest.samples);
  return manifest;
}

// Decodes one catalogued image.
inline RawImage load_image(const SampleRef& ref) { return load_image_file(ref.path); }

inline nlohmann::ordered_json manifest_to_json(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["dataset_kind"] = dataset_kind_name(m.kind);
  j["label_map"] = {{"names", m.label_map.names()}};
  nlohmann::ordered_json samples = nlohmann::ordered_json::array();
  for (const auto& s : m.samples) {
    nlohmann::ordered_json e;
    e["path"] = s.path;
    e["class_name"] = s.class_name;
    e["class_index"] = s.class_index;
    if (!s.source_id.empty()) e["source_id"] = s.source_id;
    if (!s.duplicate_of.empty()) e["duplicate_of"] = s.duplicate_of;
    samples.push_back(std::move(e));
  }
  j["samples"] = std::move(samples);
  j["class_counts"] = m.class_counts;
  j["checksum"] = m.checksum;
  return j;
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
  try {
    DatasetManifest m;
    m.kind = dataset_kind_from_name(j.at("dataset_kind").get<std::string>());
    std::vector<std::string> names = j.at("label_map").at("names").get<std::vector<std::string>>();
    m.label_map = LabelMap(m.kind, names);  // stored order is already sorted
    for (const auto& e : j.at("samples")) {
      SampleRef s;
      s.path = e.at("path").get<std::string>();
      s.class_name = e.at("class_name").get<std::string>();
      s.class_index = e.at("class_index").get<int>();
      if (e.contains("source_id")) s.source_id = e["source_id"].get<std::string>();
      if (e.contains("duplicate_of")) s.duplicate_of = e["duplicate_of"].get<std::string>();
      s.rel_path = (std::filesystem::path(s.class_name) /
                    std::filesystem::path(s.path).filename())
                       .generic_string();
      m.samples.push_back(std::move(s));
    }
    m.class_counts = j.at("class_counts").get<std::vector<std::size_t>>();
    m.checksum = j.at("checksum").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, std::string("malformed manifest JSON: ") + e.what());
  }
}

inline void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out << manifest_to_json(m).dump(2) << "\n";
}

inline DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

}  // namespace signbench
