#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "symgen/attributes.hpp"
#include "symgen/render.hpp"

namespace symgen {

enum class OverlapPolicy { kAllow, kReject, kRequire };

std::string_view to_string(OverlapPolicy p);
OverlapPolicy overlap_policy_from_string(std::string_view s);

struct SceneSpec {
  int height = 128;
  int width = 128;
  dist::UniformInt count{3, 10};
  char32_t target = U'a';
  double p_target = 0.7;
  ScalarDist scale = 0.1;
  ScalarDist rotation = dist::Normal{0.0, DefaultRanges::kRotationSigma, -DefaultRanges::kRotationLimit,
                                     DefaultRanges::kRotationLimit};
  BoolDist bold = dist::Bernoulli{0.5};
  BoolDist italic = dist::Bernoulli{0.5};
  OverlapPolicy overlap = OverlapPolicy::kAllow;
  PatternDist foreground = dist::Shades{};
  PatternDist background = dist::Shades{};
  int max_retries = 1000;

  void validate() const;
  nlohmann::json to_json() const;
  static SceneSpec from_json(const nlohmann::json& j);
};

/// Coverage of one symbol, cropped to its pixel bounding box.
struct InstanceMask {
  int x0 = 0, y0 = 0;
  Mask8 patch;

  int width() const { return static_cast<int>(patch.cols()); }
  int height() const { return static_cast<int>(patch.rows()); }
  std::uint8_t at(int x, int y) const;  ///< frame coordinates; 0 outside the patch
  Mask8 dense(int frame_height, int frame_width) const;
};

struct SceneSample {
  Image8 image;  ///< H x 3W
  std::vector<InstanceMask> instances;  ///< z-order, index 0 drawn first
  std::vector<SymbolAttributes> attributes;
  std::vector<std::int64_t> labels;
  std::vector<char32_t> codepoints;
  std::vector<Eigen::Vector2i> centers;  ///< (x, y) bounding-box centre per instance
  std::vector<Eigen::Vector2i> points;   ///< (x, y) point annotation per instance
  PatternSpec background;
  std::int64_t target_count = 0;
  bool overlap_flag = false;

  /// 0 = background, i + 1 = topmost instance i with a symbol pixel there.
  Eigen::Array<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> instance_ids() const;
  /// Per-pixel max coverage over instances.
  Mask8 union_mask() const;
  int height() const { return static_cast<int>(image.rows()); }
  int width() const { return static_cast<int>(image.cols() / 3); }
};

/// True when the two masks share at least one pixel >= 128.
bool masks_overlap(const InstanceMask& a, const InstanceMask& b);
bool any_overlap(const std::vector<InstanceMask>& instances);

/// Centroid of the mask's symbol pixels, snapped to the nearest one.
Eigen::Vector2i point_annotation(const InstanceMask& m);

class SceneComposer {
 public:
  SceneComposer(const Renderer& renderer, Alphabet alphabet, SceneSpec spec);

  SceneSample compose(std::uint64_t master_seed, std::uint64_t index) const;

  /// Composes a scene with explicit symbols and centres, no sampling.
  SceneSample compose_fixed(const std::vector<SymbolAttributes>& symbols,
                            const std::vector<Eigen::Vector2d>& centers,
                            const PatternSpec& background) const;

  const SceneSpec& spec() const { return spec_; }
  const Alphabet& alphabet() const { return alphabet_; }

 private:
  struct Placed {
    SymbolAttributes attrs;
    Outline outline;  ///< centred on the origin
    Eigen::Vector2d size;
  };
  Placed prepare(const SymbolAttributes& a) const;
  InstanceMask raster_at(const Placed& p, const Eigen::Vector2i& offset) const;
  SceneSample finish(const std::vector<Placed>& symbols, const std::vector<InstanceMask>& masks,
                     const std::vector<Eigen::Vector2i>& offsets, const PatternSpec& background) const;

  const Renderer& renderer_;
  Alphabet alphabet_;
  SceneSpec spec_;
  std::vector<char32_t> others_;
  std::int64_t target_label_ = -1;
};

/// Indices of scenes without and with an overlapping pair.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_by_overlap(
    const std::vector<SceneSample>& scenes);

}  // namespace symgen
