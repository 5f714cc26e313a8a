#pragma once

#include <cstdint>

#include <json.hpp>

#include "symgen/attributes.hpp"
#include "symgen/render.hpp"
#include "symgen/rng.hpp"

namespace symgen {

struct CorruptionSpec {
  double label_noise_p = 0.0;
  double pixel_noise_p = 0.0;  ///< probability that an image is noised
  double pixel_noise_sigma = 0.0;
  double missing_p = 0.0;
  double occlusion_p = 0.0;

  bool any() const;
  /// Throws ConfigError when a probability leaves [0, 1] or sigma < 0.
  void validate() const;
  nlohmann::json to_json() const;
  static CorruptionSpec from_json(const nlohmann::json& j);
};

struct NoisyLabel {
  std::int64_t label = 0;
  bool resampled = false;  ///< a uniform draw replaced the label (it may still equal the true one)
};

/// With probability p the label is redrawn uniformly over all n_classes.
NoisyLabel corrupt_label(std::int64_t true_label, std::int64_t n_classes, double p, Rng& rng);

/// With probability p_image adds i.i.d. N(0, sigma) to every channel of every
/// pixel and clamps to [0, 1]. Returns whether noise was applied.
bool corrupt_pixels(ImageF& image, double p_image, double sigma, Rng& rng);

/// With probability p clears attrs.render_glyph. Returns whether it did.
bool omit_symbol(SymbolAttributes& attrs, double p, Rng& rng);

/// One large shape with probability p.
OccluderSpec occlusion_spec(double p);

}  // namespace symgen
