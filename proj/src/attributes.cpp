#include "symgen/attributes.hpp"

#include <algorithm>
#include <cmath>

#include "symgen/errors.hpp"

namespace symgen {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite(double x) { return std::isfinite(x); }

[[noreturn]] void bad(std::string_view attr, const std::string& why) {
  throw ConfigError("attribute '" + std::string(attr) + "': " + why);
}

void check_prob(std::string_view attr, double p) {
  if (!(p >= 0.0 && p <= 1.0)) bad(attr, "probability must lie in [0, 1]");
}

void check_scalar(std::string_view attr, const ScalarDist& d, bool positive) {
  std::visit(overloaded{
                 [&](double v) {
                   if (!finite(v)) bad(attr, "constant must be finite");
                   if (positive && v <= 0) bad(attr, "constant must be > 0");
                 },
                 [&](const dist::Uniform& u) {
                   if (!finite(u.lo) || !finite(u.hi) || u.hi < u.lo) bad(attr, "uniform needs lo <= hi");
                   if (positive && u.lo <= 0) bad(attr, "uniform lower bound must be > 0");
                 },
                 [&](const dist::Normal& n) {
                   if (!finite(n.mean) || !(n.sigma >= 0)) bad(attr, "normal needs finite mean and sigma >= 0");
                   if (n.hi < n.lo || n.mean < n.lo || n.mean > n.hi) bad(attr, "normal truncation must contain the mean");
                   if (positive && !(n.lo > 0)) bad(attr, "normal must be truncated above 0");
                 },
                 [&](const dist::LogUniform& u) {
                   if (!(u.lo > 0) || !(u.hi >= u.lo) || !finite(u.hi)) bad(attr, "log-uniform needs 0 < lo <= hi");
                 },
                 [&](const dist::LogNormal& l) {
                   if (!(l.median > 0) || !(l.sigma >= 0) || !finite(l.median)) bad(attr, "log-normal needs median > 0 and sigma >= 0");
                 },
                 [](const std::function<double(Rng&)>&) {},
             },
             d);
}

void check_bool(std::string_view attr, const BoolDist& d) {
  if (const auto* b = std::get_if<dist::Bernoulli>(&d)) check_prob(attr, b->p);
}

void check_pair(std::string_view attr, const PairDist& d) {
  if (const auto* b = std::get_if<dist::UniformBox>(&d)) {
    if (!finite(b->lo) || !finite(b->hi) || b->hi < b->lo) bad(attr, "uniform box needs lo <= hi");
  } else if (const auto* v = std::get_if<Eigen::Vector2d>(&d)) {
    if (!v->allFinite()) bad(attr, "constant must be finite");
  }
}

void check_pattern(std::string_view attr, const PatternDist& d) {
  std::visit(overloaded{
                 [&](const dist::Shades& s) {
                   if (s.stops < 2 || s.stops > 3) bad(attr, "shades need 2 or 3 stops");
                   if (s.value_min < 0 || s.value_min > 1) bad(attr, "value_min must lie in [0, 1]");
                 },
                 [&](const dist::Camouflage& c) {
                   if (c.line_count < 1 || c.palette_size < 1 || !(c.line_width > 0))
                     bad(attr, "camouflage needs line_count, palette_size >= 1 and line_width > 0");
                   if (c.min_angle_gap < std::numbers::pi / 6 || c.min_angle_gap > std::numbers::pi / 2)
                     bad(attr, "camouflage angle gap must lie in [pi/6, pi/2]");
                 },
                 [&](const dist::RandomSolid& s) {
                   if (s.value_min < 0 || s.value_min > 1) bad(attr, "value_min must lie in [0, 1]");
                 },
                 [](const auto&) {},
             },
             d);
}

PatternSpec draw_pattern(const PatternDist& d, Rng& rng) {
  return std::visit(
      overloaded{
          [&](const dist::Shades& s) -> PatternSpec {
            GradientPattern g;
            for (int i = 0; i < s.stops; ++i) g.stops.push_back(random_hsv_color(rng, s.value_min));
            g.angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
            if (s.radial && rng.bernoulli(0.5)) {
              g.mode = GradientPattern::Mode::kRadial;
              g.center = Eigen::Vector2d(rng.uniform(), rng.uniform());
              g.radius = rng.uniform(0.3, 1.0);
            }
            return g;
          },
          [&](const SolidPattern& s) -> PatternSpec { return s; },
          [&](const dist::RandomSolid& s) -> PatternSpec {
            return SolidPattern{random_hsv_color(rng, s.value_min)};
          },
          [&](const dist::Camouflage& c) -> PatternSpec {
            CamouflagePattern p;
            p.palette_seed = rng();
            p.palette_size = c.palette_size;
            p.orientation = rng.uniform(0.0, std::numbers::pi);
            p.line_width = c.line_width;
            p.line_count = c.line_count;
            p.phase = rng.uniform();
            return p;
          },
          [&](const std::function<PatternSpec(Rng&)>& f) { return f(rng); },
      },
      d);
}

std::string codepoint_hex(char32_t c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(c));
  return buf;
}

}  // namespace

double draw(const ScalarDist& d, Rng& rng) {
  return std::visit(overloaded{
                        [](double v) { return v; },
                        [&](const dist::Uniform& u) { return rng.uniform(u.lo, u.hi); },
                        [&](const dist::Normal& n) {
                          for (int i = 0; i < 1000; ++i) {
                            const double x = rng.normal(n.mean, n.sigma);
                            if (x >= n.lo && x <= n.hi) return x;
                          }
                          return n.mean;
                        },
                        [&](const dist::LogUniform& u) {
                          return std::exp(rng.uniform(std::log(u.lo), std::log(u.hi)));
                        },
                        [&](const dist::LogNormal& l) { return l.median * std::exp(l.sigma * rng.normal()); },
                        [&](const std::function<double(Rng&)>& f) { return f(rng); },
                    },
                    d);
}

bool draw(const BoolDist& d, Rng& rng) {
  return std::visit(overloaded{
                        [](bool v) { return v; },
                        [&](const dist::Bernoulli& b) { return rng.bernoulli(b.p); },
                        [&](const std::function<bool(Rng&)>& f) { return f(rng); },
                    },
                    d);
}

Eigen::Vector2d draw(const PairDist& d, Rng& rng) {
  return std::visit(overloaded{
                        [](const Eigen::Vector2d& v) { return v; },
                        [&](const dist::UniformBox& b) {
                          const double x = rng.uniform(b.lo, b.hi);
                          const double y = rng.uniform(b.lo, b.hi);
                          return Eigen::Vector2d(x, y);
                        },
                        [&](const std::function<Eigen::Vector2d(Rng&)>& f) { return f(rng); },
                    },
                    d);
}

PatternSpec draw(const PatternDist& d, Rng& rng) { return draw_pattern(d, rng); }

Color hsv_to_rgb(double h, double s, double v) {
  h = h - std::floor(h);
  const double hh = h * 6.0;
  const int sector = std::min(5, static_cast<int>(hh));
  const double f = hh - sector;
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r, g, b;
  switch (sector) {
    case 0: r = v, g = t, b = p; break;
    case 1: r = q, g = v, b = p; break;
    case 2: r = p, g = v, b = t; break;
    case 3: r = p, g = q, b = v; break;
    case 4: r = t, g = p, b = v; break;
    default: r = v, g = p, b = q; break;
  }
  return Color(static_cast<float>(r), static_cast<float>(g), static_cast<float>(b));
}

Color random_hsv_color(Rng& rng, double value_min) {
  const double h = rng.uniform();
  const double s = rng.uniform();
  const double v = rng.uniform(value_min, 1.0);
  return hsv_to_rgb(h, s, v);
}

const std::vector<std::string>& attribute_names() {
  static const std::vector<std::string> names{"char",   "font",   "translation", "scale",     "rotation",
                                              "bold",   "italic", "foreground",  "background"};
  return names;
}

AttributeSampler::AttributeSampler(std::vector<Alphabet> alphabets, int height, int width)
    : alphabets_(std::move(alphabets)),
      height_(height),
      width_(width),
      translation_(dist::UniformBox{-DefaultRanges::kTranslation, DefaultRanges::kTranslation}),
      scale_(dist::LogUniform{DefaultRanges::kScaleMin, DefaultRanges::kScaleMax}),
      rotation_(dist::Normal{0.0, DefaultRanges::kRotationSigma, -DefaultRanges::kRotationLimit,
                             DefaultRanges::kRotationLimit}),
      bold_(dist::Bernoulli{DefaultRanges::kBoldP}),
      italic_(dist::Bernoulli{DefaultRanges::kItalicP}) {
  if (alphabets_.empty()) throw ConfigError("sampler needs at least one alphabet");
  for (const auto& a : alphabets_) {
    if (a.codepoints.empty()) throw ConfigError("alphabet '" + a.language + "' is empty");
    if (a.fonts.empty()) throw ConfigError("alphabet '" + a.language + "' has no fonts");
  }
  if (height_ < 8 || width_ < 8) throw ConfigError("resolution must be at least 8x8");
}

AttributeSampler AttributeSampler::defaults(Alphabet alphabet, int height, int width) {
  std::vector<Alphabet> v;
  v.push_back(std::move(alphabet));
  return AttributeSampler(std::move(v), height, width);
}

AttributeSampler AttributeSampler::override(std::string_view attr, Distribution d) const {
  AttributeSampler out = *this;
  auto expect = [&](auto* ptr, const char* kind) -> decltype(auto) {
    if (!ptr) bad(attr, std::string("expects a ") + kind + " distribution");
    return *ptr;
  };
  if (attr == "scale") {
    auto& s = expect(std::get_if<ScalarDist>(&d), "scalar");
    check_scalar(attr, s, true);
    out.scale_ = s;
  } else if (attr == "rotation") {
    auto& s = expect(std::get_if<ScalarDist>(&d), "scalar");
    check_scalar(attr, s, false);
    out.rotation_ = s;
  } else if (attr == "translation") {
    auto& p = expect(std::get_if<PairDist>(&d), "pair");
    check_pair(attr, p);
    out.translation_ = p;
  } else if (attr == "bold" || attr == "italic") {
    auto& b = expect(std::get_if<BoolDist>(&d), "boolean");
    check_bool(attr, b);
    (attr == "bold" ? out.bold_ : out.italic_) = b;
  } else if (attr == "char") {
    auto& c = expect(std::get_if<CharDist>(&d), "char");
    if (const auto* cp = std::get_if<char32_t>(&c)) {
      bool found = false;
      for (const auto& a : alphabets_)
        found = found || std::find(a.codepoints.begin(), a.codepoints.end(), *cp) != a.codepoints.end();
      if (!found) bad(attr, codepoint_hex(*cp) + " is not in the alphabet");
    }
    out.char_ = c;
  } else if (attr == "font") {
    auto& f = expect(std::get_if<FontDist>(&d), "font");
    if (const auto* id = std::get_if<std::string>(&f)) {
      bool found = false;
      for (const auto& a : alphabets_)
        found = found || std::find(a.fonts.begin(), a.fonts.end(), *id) != a.fonts.end();
      if (!found) bad(attr, "font '" + *id + "' is not eligible for the alphabet");
    }
    out.font_ = f;
  } else if (attr == "foreground" || attr == "background") {
    auto& p = expect(std::get_if<PatternDist>(&d), "pattern");
    check_pattern(attr, p);
    (attr == "foreground" ? out.foreground_ : out.background_) = p;
  } else {
    throw ConfigError("unknown attribute '" + std::string(attr) + "'");
  }
  return out;
}

AttributeSampler AttributeSampler::with_joint_hook(JointHook hook) const {
  AttributeSampler out = *this;
  out.hook_ = std::move(hook);
  return out;
}

std::size_t AttributeSampler::num_classes() const {
  std::size_t n = 0;
  for (const auto& a : alphabets_) n += a.codepoints.size();
  return n;
}

bool AttributeSampler::has_generators() const {
  auto gen = [](const auto& v) { return v.index() + 1 == std::variant_size_v<std::decay_t<decltype(v)>>; };
  return gen(char_) || gen(font_) || gen(translation_) || gen(scale_) || gen(rotation_) || gen(bold_) ||
         gen(italic_) || gen(foreground_) || gen(background_) || static_cast<bool>(hook_);
}

SymbolAttributes AttributeSampler::sample(std::uint64_t seed, std::uint64_t index) const {
  try {
    SymbolAttributes a;
    a.height = height_;
    a.width = width_;

    Rng lang_rng(seed, index, Slot::kLanguage);
    const std::size_t li = alphabets_.size() == 1 ? 0 : lang_rng.below(alphabets_.size());
    const Alphabet& alpha = alphabets_[li];
    a.language = alpha.language;

    Rng char_rng(seed, index, Slot::kChar);
    a.character = std::visit(overloaded{
                                 [&](dist::UniformChoice) { return alpha.codepoints[char_rng.below(alpha.codepoints.size())]; },
                                 [](char32_t c) { return c; },
                                 [&](const std::function<char32_t(Rng&)>& f) { return f(char_rng); },
                             },
                             char_);

    Rng font_rng(seed, index, Slot::kFont);
    a.font = std::visit(overloaded{
                            [&](dist::UniformChoice) { return alpha.fonts[font_rng.below(alpha.fonts.size())]; },
                            [](const std::string& s) { return s; },
                            [&](const std::function<std::string(Rng&)>& f) { return f(font_rng); },
                        },
                        font_);

    Rng t_rng(seed, index, Slot::kTranslation);
    a.translation = draw(translation_, t_rng);
    Rng s_rng(seed, index, Slot::kScale);
    a.scale = draw(scale_, s_rng);
    Rng r_rng(seed, index, Slot::kRotation);
    a.rotation = draw(rotation_, r_rng);
    Rng b_rng(seed, index, Slot::kBold);
    a.bold = draw(bold_, b_rng);
    Rng i_rng(seed, index, Slot::kItalic);
    a.italic = draw(italic_, i_rng);

    Rng fg_rng(seed, index, Slot::kForeground);
    Rng bg_rng(seed, index, Slot::kBackground);
    a.foreground = draw(foreground_, fg_rng);
    a.background = draw(background_, bg_rng);
    // Camouflage on both layers: one shared palette, orientations kept apart.
    auto* fg_camo = std::get_if<CamouflagePattern>(&a.foreground);
    auto* bg_camo = std::get_if<CamouflagePattern>(&a.background);
    if (fg_camo && bg_camo) {
      Rng tex_rng(seed, index, Slot::kTexture);
      double gap = std::numbers::pi / 4;
      if (const auto* c = std::get_if<dist::Camouflage>(&foreground_)) gap = c->min_angle_gap;
      const std::uint64_t palette = tex_rng();
      const double base = tex_rng.uniform(0.0, std::numbers::pi);
      const double delta = tex_rng.uniform(gap, std::numbers::pi - gap);
      bg_camo->palette_seed = fg_camo->palette_seed = palette;
      bg_camo->palette_size = fg_camo->palette_size;
      bg_camo->orientation = base;
      fg_camo->orientation = std::fmod(base + delta, std::numbers::pi);
    }

    if (hook_) {
      Rng h_rng(seed, index, Slot::kJointHook);
      hook_(a, h_rng);
    }

    // Label = position in the concatenated alphabets.
    std::int64_t offset = 0;
    bool found = false;
    for (const auto& al : alphabets_) {
      if (al.language == a.language) {
        const auto it = std::find(al.codepoints.begin(), al.codepoints.end(), a.character);
        if (it != al.codepoints.end()) {
          a.label = offset + (it - al.codepoints.begin());
          found = true;
        }
        if (std::find(al.fonts.begin(), al.fonts.end(), a.font) == al.fonts.end())
          throw ConfigError("font '" + a.font + "' is not eligible for " + al.language);
        break;
      }
      offset += static_cast<std::int64_t>(al.codepoints.size());
    }
    if (!found) throw ConfigError(codepoint_hex(a.character) + " is not in the sampler's alphabet");
    if (!(a.scale > 0) || !std::isfinite(a.scale)) throw ConfigError("sampled scale must be > 0");
    return a;
  } catch (const SampleError&) {
    throw;
  } catch (const std::exception& e) {
    throw SampleError(index, e.what());
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json scalar_json(const ScalarDist& d) {
  return std::visit(overloaded{
                        [](double v) { return nlohmann::json(v); },
                        [](const dist::Uniform& u) { return nlohmann::json{{"dist", "uniform"}, {"lo", u.lo}, {"hi", u.hi}}; },
                        [](const dist::Normal& n) {
                          nlohmann::json j{{"dist", "normal"}, {"mean", n.mean}, {"sigma", n.sigma}};
                          if (std::isfinite(n.lo)) j["lo"] = n.lo;
                          if (std::isfinite(n.hi)) j["hi"] = n.hi;
                          return j;
                        },
                        [](const dist::LogUniform& u) { return nlohmann::json{{"dist", "log_uniform"}, {"lo", u.lo}, {"hi", u.hi}}; },
                        [](const dist::LogNormal& l) { return nlohmann::json{{"dist", "log_normal"}, {"median", l.median}, {"sigma", l.sigma}}; },
                        [](const std::function<double(Rng&)>&) { return nlohmann::json{{"dist", "generator"}}; },
                    },
                    d);
}

nlohmann::json bool_json(const BoolDist& d) {
  return std::visit(overloaded{
                        [](bool v) { return nlohmann::json(v); },
                        [](const dist::Bernoulli& b) { return nlohmann::json{{"dist", "bernoulli"}, {"p", b.p}}; },
                        [](const std::function<bool(Rng&)>&) { return nlohmann::json{{"dist", "generator"}}; },
                    },
                    d);
}

nlohmann::json pair_json(const PairDist& d) {
  return std::visit(overloaded{
                        [](const Eigen::Vector2d& v) { return nlohmann::json::array({v.x(), v.y()}); },
                        [](const dist::UniformBox& b) { return nlohmann::json{{"dist", "uniform"}, {"lo", b.lo}, {"hi", b.hi}}; },
                        [](const std::function<Eigen::Vector2d(Rng&)>&) { return nlohmann::json{{"dist", "generator"}}; },
                    },
                    d);
}

nlohmann::json color_json(const Color& c) { return nlohmann::json::array({c.x(), c.y(), c.z()}); }

Color color_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("colour must be [r, g, b]");
  Color c(j[0].get<float>(), j[1].get<float>(), j[2].get<float>());
  if ((c.array() < 0).any() || (c.array() > 1).any()) throw ConfigError("colour channels must lie in [0, 1]");
  return c;
}

nlohmann::json pattern_dist_json(const PatternDist& d) {
  return std::visit(overloaded{
                        [](const dist::Shades& s) {
                          return nlohmann::json{{"dist", "shades"}, {"stops", s.stops}, {"value_min", s.value_min}, {"radial", s.radial}};
                        },
                        [](const SolidPattern& s) { return nlohmann::json{{"dist", "solid"}, {"color", color_json(s.color)}}; },
                        [](const dist::RandomSolid& s) { return nlohmann::json{{"dist", "random_solid"}, {"value_min", s.value_min}}; },
                        [](const dist::Camouflage& c) {
                          return nlohmann::json{{"dist", "camouflage"},       {"line_width", c.line_width},
                                                {"line_count", c.line_count}, {"palette_size", c.palette_size},
                                                {"min_angle_gap", c.min_angle_gap}};
                        },
                        [](const std::function<PatternSpec(Rng&)>&) { return nlohmann::json{{"dist", "generator"}}; },
                    },
                    d);
}

double num(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw ConfigError(std::string("missing numeric parameter '") + key + "'");
  return j[key].get<double>();
}

template <typename T>
T opt(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j[key].get<T>() : fallback;
}

}  // namespace

nlohmann::json AttributeSampler::describe() const {
  nlohmann::json langs = nlohmann::json::array();
  for (const auto& a : alphabets_)
    langs.push_back({{"language", a.language}, {"symbols", a.codepoints.size()}, {"fonts", a.fonts.size()}});
  nlohmann::json j{{"alphabets", langs},
                   {"resolution", {height_, width_}},
                   {"translation", pair_json(translation_)},
                   {"scale", scalar_json(scale_)},
                   {"rotation", scalar_json(rotation_)},
                   {"bold", bool_json(bold_)},
                   {"italic", bool_json(italic_)},
                   {"foreground", pattern_dist_json(foreground_)},
                   {"background", pattern_dist_json(background_)},
                   {"joint_hook", static_cast<bool>(hook_)}};
  j["char"] = std::holds_alternative<char32_t>(char_) ? nlohmann::json(to_utf8(std::get<char32_t>(char_)))
              : std::holds_alternative<dist::UniformChoice>(char_) ? nlohmann::json{{"dist", "uniform"}}
                                                                   : nlohmann::json{{"dist", "generator"}};
  j["font"] = std::holds_alternative<std::string>(font_) ? nlohmann::json(std::get<std::string>(font_))
              : std::holds_alternative<dist::UniformChoice>(font_) ? nlohmann::json{{"dist", "uniform"}}
                                                                   : nlohmann::json{{"dist", "generator"}};
  return j;
}

Distribution distribution_from_json(std::string_view attr, const nlohmann::json& j) {
  const bool is_dist = j.is_object() && j.contains("dist");
  const std::string kind = is_dist ? j["dist"].get<std::string>() : "";
  if (kind == "generator") bad(attr, "generator functions cannot be loaded from a config file");
  if (attr == "scale" || attr == "rotation") {
    if (j.is_number()) return ScalarDist{j.get<double>()};
    if (kind == "uniform") return ScalarDist{dist::Uniform{num(j, "lo"), num(j, "hi")}};
    if (kind == "normal") {
      dist::Normal n{num(j, "mean"), num(j, "sigma")};
      if (j.contains("lo")) n.lo = num(j, "lo");
      if (j.contains("hi")) n.hi = num(j, "hi");
      return ScalarDist{n};
    }
    if (kind == "log_uniform") return ScalarDist{dist::LogUniform{num(j, "lo"), num(j, "hi")}};
    if (kind == "log_normal") return ScalarDist{dist::LogNormal{num(j, "median"), num(j, "sigma")}};
  } else if (attr == "bold" || attr == "italic") {
    if (j.is_boolean()) return BoolDist{j.get<bool>()};
    if (kind == "bernoulli") return BoolDist{dist::Bernoulli{num(j, "p")}};
  } else if (attr == "translation") {
    if (j.is_array() && j.size() == 2) return PairDist{Eigen::Vector2d(j[0].get<double>(), j[1].get<double>())};
    if (kind == "uniform") return PairDist{dist::UniformBox{num(j, "lo"), num(j, "hi")}};
  } else if (attr == "char") {
    if (j.is_string()) return CharDist{from_utf8(j.get<std::string>())};
    if (kind == "uniform") return CharDist{dist::UniformChoice{}};
  } else if (attr == "font") {
    if (j.is_string()) return FontDist{j.get<std::string>()};
    if (kind == "uniform") return FontDist{dist::UniformChoice{}};
  } else if (attr == "foreground" || attr == "background") {
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s == "white") return PatternDist{SolidPattern{Color::Ones()}};
      if (s == "black") return PatternDist{SolidPattern{Color::Zero()}};
      if (s == "shades") return PatternDist{dist::Shades{}};
      if (s == "camouflage") return PatternDist{dist::Camouflage{}};
    }
    if (kind == "shades")
      return PatternDist{dist::Shades{opt(j, "stops", 2), opt(j, "value_min", 0.3), opt(j, "radial", false)}};
    if (kind == "solid") return PatternDist{SolidPattern{color_from(j.at("color"))}};
    if (kind == "random_solid") return PatternDist{dist::RandomSolid{opt(j, "value_min", 0.3)}};
    if (kind == "camouflage") {
      dist::Camouflage c;
      c.line_width = opt(j, "line_width", c.line_width);
      c.line_count = opt(j, "line_count", c.line_count);
      c.palette_size = opt(j, "palette_size", c.palette_size);
      c.min_angle_gap = opt(j, "min_angle_gap", c.min_angle_gap);
      return PatternDist{c};
    }
  } else {
    throw ConfigError("unknown attribute '" + std::string(attr) + "'");
  }
  bad(attr, "unsupported distribution " + j.dump());
}

nlohmann::json to_json(const ScalarDist& d) { return scalar_json(d); }
nlohmann::json to_json(const BoolDist& d) { return bool_json(d); }
nlohmann::json to_json(const PairDist& d) { return pair_json(d); }
nlohmann::json to_json(const PatternDist& d) { return pattern_dist_json(d); }

nlohmann::json pattern_to_json(const PatternSpec& p) {
  return std::visit(overloaded{
                        [](const SolidPattern& s) { return nlohmann::json{{"kind", "solid"}, {"color", color_json(s.color)}}; },
                        [](const GradientPattern& g) {
                          nlohmann::json stops = nlohmann::json::array();
                          for (const auto& c : g.stops) stops.push_back(color_json(c));
                          nlohmann::json j{{"kind", "gradient"},
                                           {"mode", g.mode == GradientPattern::Mode::kLinear ? "linear" : "radial"},
                                           {"stops", stops}};
                          if (g.mode == GradientPattern::Mode::kLinear) {
                            j["angle"] = g.angle;
                          } else {
                            j["center"] = {g.center.x(), g.center.y()};
                            j["radius"] = g.radius;
                          }
                          return j;
                        },
                        [](const CamouflagePattern& c) {
                          return nlohmann::json{{"kind", "camouflage"},         {"palette_seed", c.palette_seed},
                                                {"palette_size", c.palette_size}, {"orientation", c.orientation},
                                                {"line_width", c.line_width},     {"line_count", c.line_count},
                                                {"phase", c.phase}};
                        },
                    },
                    p);
}

PatternSpec pattern_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "solid") return SolidPattern{color_from(j.at("color"))};
  if (kind == "gradient") {
    GradientPattern g;
    g.mode = j.at("mode").get<std::string>() == "radial" ? GradientPattern::Mode::kRadial
                                                         : GradientPattern::Mode::kLinear;
    for (const auto& c : j.at("stops")) g.stops.push_back(color_from(c));
    if (g.stops.size() < 2) throw ConfigError("gradient needs at least 2 stops");
    if (g.mode == GradientPattern::Mode::kLinear) {
      g.angle = j.at("angle").get<double>();
    } else {
      g.center = Eigen::Vector2d(j.at("center")[0].get<double>(), j.at("center")[1].get<double>());
      g.radius = j.at("radius").get<double>();
    }
    return g;
  }
  if (kind == "camouflage") {
    CamouflagePattern c;
    c.palette_seed = j.at("palette_seed").get<std::uint64_t>();
    c.palette_size = j.at("palette_size").get<int>();
    c.orientation = j.at("orientation").get<double>();
    c.line_width = j.at("line_width").get<double>();
    c.line_count = j.at("line_count").get<int>();
    c.phase = j.at("phase").get<double>();
    return c;
  }
  throw ConfigError("unknown pattern kind '" + kind + "'");
}

nlohmann::json attributes_to_json(const SymbolAttributes& a) {
  return {{"char", to_utf8(a.character)},
          {"codepoint", static_cast<std::uint32_t>(a.character)},
          {"label", a.label},
          {"font", a.font},
          {"language", a.language},
          {"translation", {a.translation.x(), a.translation.y()}},
          {"scale", a.scale},
          {"rotation", a.rotation},
          {"bold", a.bold},
          {"italic", a.italic},
          {"foreground", pattern_to_json(a.foreground)},
          {"background", pattern_to_json(a.background)},
          {"resolution", {a.height, a.width}},
          {"render_glyph", a.render_glyph}};
}

SymbolAttributes attributes_from_json(const nlohmann::json& j) {
  SymbolAttributes a;
  a.character = static_cast<char32_t>(j.at("codepoint").get<std::uint32_t>());
  a.label = j.at("label").get<std::int64_t>();
  a.font = j.at("font").get<std::string>();
  a.language = j.at("language").get<std::string>();
  a.translation = Eigen::Vector2d(j.at("translation")[0].get<double>(), j.at("translation")[1].get<double>());
  a.scale = j.at("scale").get<double>();
  a.rotation = j.at("rotation").get<double>();
  a.bold = j.at("bold").get<bool>();
  a.italic = j.at("italic").get<bool>();
  a.foreground = pattern_from_json(j.at("foreground"));
  a.background = pattern_from_json(j.at("background"));
  a.height = j.at("resolution")[0].get<int>();
  a.width = j.at("resolution")[1].get<int>();
  a.render_glyph = j.value("render_glyph", true);
  return a;
}

}  // namespace symgen
