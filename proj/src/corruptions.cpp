#include "symgen/corruptions.hpp"

#include <algorithm>

#include "symgen/errors.hpp"

namespace symgen {

bool CorruptionSpec::any() const {
  return label_noise_p > 0 || pixel_noise_p > 0 || missing_p > 0 || occlusion_p > 0;
}

void CorruptionSpec::validate() const {
  auto prob = [](const char* name, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  prob("label_noise_p", label_noise_p);
  prob("pixel_noise_p", pixel_noise_p);
  prob("missing_p", missing_p);
  prob("occlusion_p", occlusion_p);
  if (!(pixel_noise_sigma >= 0.0)) throw ConfigError("pixel_noise_sigma must be >= 0");
}

nlohmann::json CorruptionSpec::to_json() const {
  return {{"label_noise_p", label_noise_p},
          {"pixel_noise_p", pixel_noise_p},
          {"pixel_noise_sigma", pixel_noise_sigma},
          {"missing_p", missing_p},
          {"occlusion_p", occlusion_p}};
}

CorruptionSpec CorruptionSpec::from_json(const nlohmann::json& j) {
  CorruptionSpec c;
  c.label_noise_p = j.value("label_noise_p", 0.0);
  c.pixel_noise_p = j.value("pixel_noise_p", 0.0);
  c.pixel_noise_sigma = j.value("pixel_noise_sigma", 0.0);
  c.missing_p = j.value("missing_p", 0.0);
  c.occlusion_p = j.value("occlusion_p", 0.0);
  c.validate();
  return c;
}

NoisyLabel corrupt_label(std::int64_t true_label, std::int64_t n_classes, double p, Rng& rng) {
  if (n_classes < 2) throw ConfigError("label noise needs at least 2 classes");
  NoisyLabel out{true_label, false};
  if (rng.bernoulli(p)) {
    out.resampled = true;
    out.label = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n_classes)));
  }
  return out;
}

bool corrupt_pixels(ImageF& image, double p_image, double sigma, Rng& rng) {
  if (!rng.bernoulli(p_image)) return false;
  if (sigma > 0) {
    for (Eigen::Index i = 0; i < image.size(); ++i) {
      const double v = image.data()[i] + rng.normal(0.0, sigma);
      image.data()[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return true;
}

bool omit_symbol(SymbolAttributes& attrs, double p, Rng& rng) {
  if (!rng.bernoulli(p)) return false;
  attrs.render_glyph = false;
  return true;
}

OccluderSpec occlusion_spec(double p) {
  OccluderSpec s;
  s.count = dist::Bernoulli{p};
  return s;
}

}  // namespace symgen
