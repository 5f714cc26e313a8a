#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "symgen/font_catalog.hpp"
#include "symgen/rng.hpp"

namespace symgen {

using Color = Eigen::Vector3f;  ///< linear RGB in [0, 1]

struct SolidPattern {
  Color color = Color::Zero();
};

struct GradientPattern {
  enum class Mode { kLinear, kRadial };
  Mode mode = Mode::kLinear;
  std::vector<Color> stops;  ///< 2 or 3 colours
  double angle = 0.0;        ///< linear: direction of increasing t, radians
  Eigen::Vector2d center = Eigen::Vector2d::Constant(0.5);  ///< radial, frame fraction
  double radius = 0.7;       ///< radial, fraction of the frame diagonal
};

/// Parallel strokes cycling through a palette. Foreground and background of
/// one image share `palette_seed` and differ only in orientation.
struct CamouflagePattern {
  std::uint64_t palette_seed = 0;
  int palette_size = 4;
  double orientation = 0.0;  ///< [0, pi)
  double line_width = 1.0 / 32.0;  ///< fraction of min(H, W)
  int line_count = 40;             ///< strokes laid edge to edge across the frame
  double phase = 0.0;        ///< [0, 1) stroke offset
};

using PatternSpec = std::variant<SolidPattern, GradientPattern, CamouflagePattern>;

/// Complete latent description of one single-symbol image.
struct SymbolAttributes {
  char32_t character = U'a';
  std::int64_t label = 0;  ///< class index of `character` in the sampler's label space
  std::string font;
  std::string language;
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();
  double scale = 0.5;
  double rotation = 0.0;
  bool bold = false;
  bool italic = false;
  PatternSpec foreground = SolidPattern{Color::Ones()};
  PatternSpec background = SolidPattern{Color::Zero()};
  int height = 32;
  int width = 32;
  bool render_glyph = true;  ///< cleared when the symbol is deliberately omitted
};

// ---------------------------------------------------------------------------
// Distributions

namespace dist {
struct Uniform {
  double lo, hi;
};
/// Normal, optionally truncated to [lo, hi] by resampling.
struct Normal {
  double mean, sigma;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};
/// exp(U(ln lo, ln hi)).
struct LogUniform {
  double lo, hi;
};
/// median * exp(sigma * eps), eps ~ N(0, 1).
struct LogNormal {
  double median, sigma;
};
struct Bernoulli {
  double p;
};
/// Both coordinates i.i.d. U(lo, hi).
struct UniformBox {
  double lo, hi;
};
/// Uniform over the sampler's alphabet (char) or its eligible fonts (font).
struct UniformChoice {};
/// Gradient shades with HSV colours, value in [value_min, 1].
struct Shades {
  int stops = 2;
  double value_min = 0.3;
  bool radial = false;  ///< allow radial gradients (half the time)
};
/// Solid colour drawn uniformly in HSV.
struct RandomSolid {
  double value_min = 0.3;
};
struct Camouflage {
  double line_width = 1.0 / 32.0;
  int line_count = 40;
  int palette_size = 4;
  double min_angle_gap = std::numbers::pi / 4;
};
}  // namespace dist

using ScalarDist = std::variant<double, dist::Uniform, dist::Normal, dist::LogUniform,
                                dist::LogNormal, std::function<double(Rng&)>>;
using BoolDist = std::variant<bool, dist::Bernoulli, std::function<bool(Rng&)>>;
using PairDist = std::variant<Eigen::Vector2d, dist::UniformBox, std::function<Eigen::Vector2d(Rng&)>>;
using CharDist = std::variant<dist::UniformChoice, char32_t, std::function<char32_t(Rng&)>>;
using FontDist = std::variant<dist::UniformChoice, std::string, std::function<std::string(Rng&)>>;
using PatternDist = std::variant<dist::Shades, SolidPattern, dist::RandomSolid, dist::Camouflage,
                                 std::function<PatternSpec(Rng&)>>;

/// Any attribute distribution; override() checks it against the attribute.
using Distribution = std::variant<ScalarDist, BoolDist, PairDist, CharDist, FontDist, PatternDist>;

double draw(const ScalarDist& d, Rng& rng);
bool draw(const BoolDist& d, Rng& rng);
Eigen::Vector2d draw(const PairDist& d, Rng& rng);
PatternSpec draw(const PatternDist& d, Rng& rng);

Color hsv_to_rgb(double h, double s, double v);
Color random_hsv_color(Rng& rng, double value_min);

/// Mutable hook applied after all attributes are drawn.
using JointHook = std::function<void(SymbolAttributes&, Rng&)>;

/// Constants of the default recipe, kept together so recipes can pin them.
struct DefaultRanges {
  static constexpr double kScaleMin = 0.35;
  static constexpr double kScaleMax = 0.9;
  static constexpr double kRotationSigma = 0.3;
  static constexpr double kRotationLimit = std::numbers::pi / 3;
  static constexpr double kBoldP = 0.5;
  static constexpr double kItalicP = 0.5;
  static constexpr double kTranslation = 1.0;
};

/// Attribute names accepted by override(), in record order.
const std::vector<std::string>& attribute_names();

/// Immutable description of how SymbolAttributes are drawn. Sampling is a
/// pure function of (sampler, master seed, index): every attribute reads its
/// own counter-derived stream.
class AttributeSampler {
 public:
  AttributeSampler(std::vector<Alphabet> alphabets, int height, int width);

  /// Default recipe over one alphabet.
  static AttributeSampler defaults(Alphabet alphabet, int height = 32, int width = 32);

  /// Copy with one attribute's distribution replaced. Throws ConfigError for
  /// unknown names, mismatched distribution kinds, or out-of-domain parameters.
  AttributeSampler override(std::string_view attribute, Distribution d) const;
  AttributeSampler with_joint_hook(JointHook hook) const;

  SymbolAttributes sample(std::uint64_t master_seed, std::uint64_t index) const;

  const std::vector<Alphabet>& alphabets() const { return alphabets_; }
  /// Total number of classes (sum of alphabet sizes).
  std::size_t num_classes() const;
  int height() const { return height_; }
  int width() const { return width_; }
  /// True when any distribution is a caller-supplied function (such samplers
  /// cannot be rebuilt from a config file).
  bool has_generators() const;

  /// Declarative description of the active distributions. Generator
  /// functions serialize as {"dist": "generator"}.
  nlohmann::json describe() const;

  const ScalarDist& scale() const { return scale_; }
  const ScalarDist& rotation() const { return rotation_; }
  const PairDist& translation() const { return translation_; }
  const BoolDist& bold() const { return bold_; }
  const BoolDist& italic() const { return italic_; }

 private:
  std::vector<Alphabet> alphabets_;
  int height_, width_;
  CharDist char_ = dist::UniformChoice{};
  FontDist font_ = dist::UniformChoice{};
  PairDist translation_;
  ScalarDist scale_;
  ScalarDist rotation_;
  BoolDist bold_;
  BoolDist italic_;
  PatternDist foreground_ = dist::Shades{};
  PatternDist background_ = dist::Shades{};
  JointHook hook_;
};

/// Parses {constant | {"dist": name, ...params}} for the given attribute.
Distribution distribution_from_json(std::string_view attribute, const nlohmann::json& j);

nlohmann::json to_json(const ScalarDist& d);
nlohmann::json to_json(const BoolDist& d);
nlohmann::json to_json(const PairDist& d);
nlohmann::json to_json(const PatternDist& d);

nlohmann::json pattern_to_json(const PatternSpec& p);
PatternSpec pattern_from_json(const nlohmann::json& j);
nlohmann::json attributes_to_json(const SymbolAttributes& a);
SymbolAttributes attributes_from_json(const nlohmann::json& j);

}  // namespace symgen
