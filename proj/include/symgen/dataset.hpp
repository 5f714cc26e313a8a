#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "symgen/font_catalog.hpp"
#include "symgen/partition.hpp"
#include "symgen/recipes.hpp"
#include "symgen/render.hpp"

namespace symgen {

inline constexpr const char* kGeneratorName = "symgen";
inline constexpr const char* kGeneratorVersion = "1.0.0";
/// On-disk layout version; bump when dataset names or encodings change.
inline constexpr int kFormatVersion = 1;

/// Scene instance masks: one cropped patch per instance.
struct InstanceMaskStore {
  std::vector<std::int64_t> offsets;        ///< N + 1, scene i owns instances [offsets[i], offsets[i+1])
  std::vector<std::int32_t> boxes;          ///< 4 per instance: x0, y0, width, height
  std::vector<std::int64_t> pixel_offsets;  ///< M + 1 into `data`
  std::vector<std::uint8_t> data;

  std::size_t instance_count() const { return boxes.size() / 4; }
  bool empty() const { return offsets.empty(); }
  bool operator==(const InstanceMaskStore&) const = default;
};

struct DatasetContainer {
  std::size_t n = 0;
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> images;  ///< N x H x W x 3
  std::vector<std::uint8_t> masks;   ///< N x H x W (union coverage for scenes)
  std::vector<std::string> attributes;  ///< one JSON record per sample
  std::map<std::string, std::vector<std::int64_t>> labels;  ///< "clean", "noisy", ...
  std::map<std::string, PartitionResult> splits;  ///< "default" is the i.i.d. 60/20/20 split
  std::vector<std::uint16_t> instance_ids;  ///< N x H x W, scenes only
  InstanceMaskStore instance_masks;         ///< scenes only
  nlohmann::json manifest = nlohmann::json::object();

  bool is_scene() const { return !instance_ids.empty(); }
  std::size_t image_bytes() const { return static_cast<std::size_t>(height) * width * 3; }
  std::size_t mask_bytes() const { return static_cast<std::size_t>(height) * width; }
  const std::uint8_t* image(std::size_t i) const { return images.data() + i * image_bytes(); }
  const std::uint8_t* mask(std::size_t i) const { return masks.data() + i * mask_bytes(); }
  Image8 image_array(std::size_t i) const;
  Mask8 mask_array(std::size_t i) const;
  nlohmann::json attribute(std::size_t i) const { return nlohmann::json::parse(attributes.at(i)); }

  /// Throws FormatError when shapes, split indices, or label lengths disagree.
  void validate() const;
  /// Field-by-field equality; the manifest creation timestamp is ignored.
  bool equal_payload(const DatasetContainer& other) const;
  /// FNV-1a 64 over a named array ("images", "masks", "attributes", ...).
  std::uint64_t payload_hash(std::string_view field) const;
};

struct GenerateOptions {
  std::size_t workers = 1;
  std::filesystem::path font_dir;   ///< recorded in the manifest
  std::filesystem::path blacklist;  ///< recorded in the manifest
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Generates samples 0..n-1. Output is independent of the worker count.
/// A failing sample aborts generation with SampleError naming the lowest
/// failing index.
DatasetContainer generate_dataset(const RecipeConfig& recipe, const FontCatalog& catalog,
                                  std::size_t n_samples, std::uint64_t master_seed,
                                  const GenerateOptions& options = {});

/// Same, with an explicit attribute sampler (used by library callers that
/// supply generator functions; such manifests are marked non-portable).
DatasetContainer generate_dataset(const AttributeSampler& sampler, const RecipeConfig& recipe,
                                  const FontCatalog& catalog, std::size_t n_samples,
                                  std::uint64_t master_seed, const GenerateOptions& options = {});

/// Rebuilds a dataset from its manifest, reusing the recorded font paths
/// unless `catalog` is given.
DatasetContainer regenerate(const nlohmann::json& manifest, const FontCatalog& catalog,
                            std::size_t workers = 1);

enum class Format { kHdf5, kNpz };
/// From the path extension (.h5, .hdf5, .npz); throws IoError otherwise.
Format format_from_path(const std::filesystem::path& path);
std::string_view to_string(Format f);

/// Writes `c` (and a sidecar <path>.manifest.json). Throws IoError when the
/// extension disagrees with `format` or the path is unwritable.
void write_dataset(const DatasetContainer& c, const std::filesystem::path& path, Format format);
void write_dataset(const DatasetContainer& c, const std::filesystem::path& path);
/// Throws IoError for unreadable files and FormatError for corrupt ones.
DatasetContainer read_dataset(const std::filesystem::path& path);

void write_hdf5(const DatasetContainer& c, const std::filesystem::path& path);
DatasetContainer read_hdf5(const std::filesystem::path& path);
void write_npz(const DatasetContainer& c, const std::filesystem::path& path);
DatasetContainer read_npz(const std::filesystem::path& path);

/// First rows*cols images tiled with 1-pixel white separators and border.
Image8 preview_grid(const DatasetContainer& c, int rows, int cols);

/// RGB (H x 3W) or grey (H x W, channels = 1) PNG.
void write_png(const std::filesystem::path& path, const Image8& pixels, int channels);

/// Per-sample numeric attribute by name: scale, rotation, translation_x,
/// translation_y, bold, italic, label, count. Throws ConfigError otherwise.
std::vector<double> numeric_attribute(const DatasetContainer& c, std::string_view name);
/// Per-sample categorical attribute: char, font, language, bold, italic, label.
std::vector<std::string> categorical_attribute(const DatasetContainer& c, std::string_view name);

/// JSON report: sizes, label cardinalities, splits, mask stats, attribute summaries.
nlohmann::json inspect(const DatasetContainer& c);

}  // namespace symgen
