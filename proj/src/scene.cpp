#include "symgen/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "symgen/errors.hpp"

namespace symgen {

std::string_view to_string(OverlapPolicy p) {
  switch (p) {
    case OverlapPolicy::kAllow: return "allow";
    case OverlapPolicy::kReject: return "reject-overlapping";
    case OverlapPolicy::kRequire: return "require-overlapping";
  }
  return "allow";
}

OverlapPolicy overlap_policy_from_string(std::string_view s) {
  if (s == "allow") return OverlapPolicy::kAllow;
  if (s == "reject-overlapping" || s == "reject") return OverlapPolicy::kReject;
  if (s == "require-overlapping" || s == "require") return OverlapPolicy::kRequire;
  throw ConfigError("unknown overlap policy '" + std::string(s) + "'");
}

void SceneSpec::validate() const {
  if (height < 8 || width < 8) throw ConfigError("scene resolution must be at least 8x8");
  if (count.lo < 1 || count.hi < count.lo) throw ConfigError("scene count range needs 1 <= lo <= hi");
  if (!(p_target >= 0 && p_target <= 1)) throw ConfigError("p_target must lie in [0, 1]");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (count.hi >= std::numeric_limits<std::uint16_t>::max()) throw ConfigError("too many symbols per scene");
}

nlohmann::json SceneSpec::to_json() const {
  return {{"resolution", {height, width}},
          {"count", {count.lo, count.hi}},
          {"target", to_utf8(target)},
          {"p_target", p_target},
          {"scale", symgen::to_json(scale)},
          {"rotation", symgen::to_json(rotation)},
          {"bold", symgen::to_json(bold)},
          {"italic", symgen::to_json(italic)},
          {"overlap", std::string(to_string(overlap))},
          {"foreground", symgen::to_json(foreground)},
          {"background", symgen::to_json(background)},
          {"max_retries", max_retries}};
}

SceneSpec SceneSpec::from_json(const nlohmann::json& j) {
  SceneSpec s;
  if (j.contains("resolution")) {
    s.height = j["resolution"].at(0).get<int>();
    s.width = j["resolution"].at(1).get<int>();
  }
  if (j.contains("count")) s.count = {j["count"].at(0).get<int>(), j["count"].at(1).get<int>()};
  if (j.contains("target")) s.target = from_utf8(j["target"].get<std::string>());
  s.p_target = j.value("p_target", s.p_target);
  if (j.contains("scale")) s.scale = std::get<ScalarDist>(distribution_from_json("scale", j["scale"]));
  if (j.contains("rotation")) s.rotation = std::get<ScalarDist>(distribution_from_json("rotation", j["rotation"]));
  if (j.contains("bold")) s.bold = std::get<BoolDist>(distribution_from_json("bold", j["bold"]));
  if (j.contains("italic")) s.italic = std::get<BoolDist>(distribution_from_json("italic", j["italic"]));
  if (j.contains("overlap")) s.overlap = overlap_policy_from_string(j["overlap"].get<std::string>());
  if (j.contains("foreground"))
    s.foreground = std::get<PatternDist>(distribution_from_json("foreground", j["foreground"]));
  if (j.contains("background"))
    s.background = std::get<PatternDist>(distribution_from_json("background", j["background"]));
  s.max_retries = j.value("max_retries", s.max_retries);
  s.validate();
  return s;
}

std::uint8_t InstanceMask::at(int x, int y) const {
  const int lx = x - x0, ly = y - y0;
  if (lx < 0 || ly < 0 || lx >= width() || ly >= height()) return 0;
  return patch(ly, lx);
}

Mask8 InstanceMask::dense(int frame_height, int frame_width) const {
  Mask8 m = Mask8::Zero(frame_height, frame_width);
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x) {
      const int fx = x0 + x, fy = y0 + y;
      if (fx >= 0 && fy >= 0 && fx < frame_width && fy < frame_height) m(fy, fx) = patch(y, x);
    }
  return m;
}

bool masks_overlap(const InstanceMask& a, const InstanceMask& b) {
  const int x_lo = std::max(a.x0, b.x0), x_hi = std::min(a.x0 + a.width(), b.x0 + b.width());
  const int y_lo = std::max(a.y0, b.y0), y_hi = std::min(a.y0 + a.height(), b.y0 + b.height());
  for (int y = y_lo; y < y_hi; ++y)
    for (int x = x_lo; x < x_hi; ++x)
      if (a.at(x, y) >= 128 && b.at(x, y) >= 128) return true;
  return false;
}

bool any_overlap(const std::vector<InstanceMask>& instances) {
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (std::size_t j = i + 1; j < instances.size(); ++j)
      if (masks_overlap(instances[i], instances[j])) return true;
  return false;
}

Eigen::Vector2i point_annotation(const InstanceMask& m) {
  int threshold = 128;
  if ((m.patch >= 128).count() == 0) threshold = std::max<int>(1, m.patch.size() ? m.patch.maxCoeff() : 1);
  double sx = 0, sy = 0, n = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.patch(y, x) >= threshold) sx += x + 0.5, sy += y + 0.5, n += 1;
  if (n == 0) return {m.x0, m.y0};
  const double cx = sx / n, cy = sy / n;
  Eigen::Vector2i best(0, 0);
  double best_d = std::numeric_limits<double>::max();
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (m.patch(y, x) < threshold) continue;
      const double d = (x + 0.5 - cx) * (x + 0.5 - cx) + (y + 0.5 - cy) * (y + 0.5 - cy);
      if (d < best_d) best_d = d, best = {x, y};
    }
  return {m.x0 + best.x(), m.y0 + best.y()};
}

Eigen::Array<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> SceneSample::instance_ids() const {
  Eigen::Array<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ids =
      Eigen::Array<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(height(), width());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& m = instances[i];
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x)
        if (m.patch(y, x) >= 128) ids(m.y0 + y, m.x0 + x) = static_cast<std::uint16_t>(i + 1);
  }
  return ids;
}

Mask8 SceneSample::union_mask() const {
  Mask8 u = Mask8::Zero(height(), width());
  for (const auto& m : instances)
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x)
        u(m.y0 + y, m.x0 + x) = std::max(u(m.y0 + y, m.x0 + x), m.patch(y, x));
  return u;
}

SceneComposer::SceneComposer(const Renderer& renderer, Alphabet alphabet, SceneSpec spec)
    : renderer_(renderer), alphabet_(std::move(alphabet)), spec_(std::move(spec)) {
  spec_.validate();
  if (alphabet_.codepoints.empty() || alphabet_.fonts.empty())
    throw ConfigError("scene alphabet needs symbols and fonts");
  for (std::size_t i = 0; i < alphabet_.codepoints.size(); ++i) {
    if (alphabet_.codepoints[i] == spec_.target) target_label_ = static_cast<std::int64_t>(i);
    else others_.push_back(alphabet_.codepoints[i]);
  }
  if (target_label_ < 0) throw ConfigError("scene target symbol is not in the alphabet");
  if (others_.empty() && spec_.p_target < 1) throw ConfigError("scene alphabet has no non-target symbols");
}

SceneComposer::Placed SceneComposer::prepare(const SymbolAttributes& a) const {
  const auto& cat = renderer_.catalog();
  const auto g = cat.glyph_outline(cat.font(a.font), a.character, a.bold, a.italic);
  Placed p;
  p.attrs = a;
  p.outline = place_outline(g.outline, g.bbox, a.scale * std::min(a.height, a.width), a.rotation,
                            Eigen::Vector2d::Zero(), 0, 0);
  const Box2d box = p.outline.bbox();
  p.size = Eigen::Vector2d(box.width(), box.height());
  return p;
}

InstanceMask SceneComposer::raster_at(const Placed& p, const Eigen::Vector2i& offset) const {
  const Box2d box = p.outline.bbox();
  InstanceMask m;
  m.x0 = std::max(0, static_cast<int>(std::floor(box.min.x())) + offset.x());
  m.y0 = std::max(0, static_cast<int>(std::floor(box.min.y())) + offset.y());
  const int x1 = std::min(spec_.width, static_cast<int>(std::ceil(box.max.x())) + offset.x());
  const int y1 = std::min(spec_.height, static_cast<int>(std::ceil(box.max.y())) + offset.y());
  if (x1 <= m.x0 || y1 <= m.y0) {
    m.patch.resize(0, 0);
    return m;
  }
  Affine2<double> shift = Affine2<double>::Identity();
  shift.translate(Eigen::Vector2d(offset.x() - m.x0, offset.y() - m.y0));
  m.patch = to_mask8(rasterize(p.outline.transformed(shift), y1 - m.y0, x1 - m.x0));
  return m;
}

SceneSample SceneComposer::finish(const std::vector<Placed>& symbols, const std::vector<InstanceMask>& masks,
                                  const std::vector<Eigen::Vector2i>& offsets,
                                  const PatternSpec& background) const {
  const int h = spec_.height, w = spec_.width;
  ImageF image;
  fill_pattern(image, background, h, w);
  SceneSample s;
  s.background = background;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    Plane cov = Plane::Zero(h, w);
    const auto& m = masks[i];
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) cov(m.y0 + y, m.x0 + x) = m.patch(y, x) / 255.0f;
    composite(image, cov, symbols[i].attrs.foreground);
    s.attributes.push_back(symbols[i].attrs);
    s.centers.push_back(offsets[i]);
    s.codepoints.push_back(symbols[i].attrs.character);
    s.labels.push_back(symbols[i].attrs.label);
    s.points.push_back(point_annotation(m));
    if (symbols[i].attrs.character == spec_.target) ++s.target_count;
  }
  s.instances = masks;
  s.overlap_flag = any_overlap(masks);
  s.image = quantize(image);
  return s;
}

SceneSample SceneComposer::compose(std::uint64_t seed, std::uint64_t index) const {
  const int h = spec_.height, w = spec_.width;
  Rng count_rng(seed, index, Slot::kSceneCount);
  const int n = static_cast<int>(count_rng.between(spec_.count.lo, spec_.count.hi));

  Rng sym_rng(seed, index, Slot::kSceneSymbols);
  std::vector<Placed> symbols;
  symbols.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng r = sym_rng.fork(static_cast<std::uint64_t>(i));
    SymbolAttributes a;
    a.height = h;
    a.width = w;
    a.language = alphabet_.language;
    if (r.bernoulli(spec_.p_target) || others_.empty()) {
      a.character = spec_.target;
    } else {
      a.character = others_[r.below(others_.size())];
    }
    a.label = std::find(alphabet_.codepoints.begin(), alphabet_.codepoints.end(), a.character) -
              alphabet_.codepoints.begin();
    a.font = alphabet_.fonts[r.below(alphabet_.fonts.size())];
    a.scale = draw(spec_.scale, r);
    a.rotation = draw(spec_.rotation, r);
    a.bold = draw(spec_.bold, r);
    a.italic = draw(spec_.italic, r);
    a.foreground = draw(spec_.foreground, r);
    a.background = SolidPattern{};
    if (!(a.scale > 0)) throw ConfigError("scene scale must be > 0");
    symbols.push_back(prepare(a));
  }

  Rng place_rng(seed, index, Slot::kScenePlacement);
  auto draw_offset = [&](const Placed& p) {
    auto axis = [&](double size, int frame) {
      const double c = size >= frame ? frame / 2.0 : place_rng.uniform(size / 2.0, frame - size / 2.0);
      return static_cast<int>(std::floor(c + 0.5));
    };
    const int x = axis(p.size.x(), w);
    const int y = axis(p.size.y(), h);
    return Eigen::Vector2i(x, y);
  };

  std::vector<InstanceMask> masks(symbols.size());
  std::vector<Eigen::Vector2i> offsets(symbols.size());
  int retries = 0;
  auto fail = [&] {
    throw Error("overlap policy '" + std::string(to_string(spec_.overlap)) + "' unsatisfiable within " +
                std::to_string(spec_.max_retries) + " retries");
  };
  if (spec_.overlap == OverlapPolicy::kReject) {
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      while (true) {
        offsets[i] = draw_offset(symbols[i]);
        masks[i] = raster_at(symbols[i], offsets[i]);
        bool clash = false;
        for (std::size_t j = 0; j < i && !clash; ++j) clash = masks_overlap(masks[i], masks[j]);
        if (!clash) break;
        if (++retries > spec_.max_retries) fail();
      }
    }
  } else {
    while (true) {
      for (std::size_t i = 0; i < symbols.size(); ++i) {
        offsets[i] = draw_offset(symbols[i]);
        masks[i] = raster_at(symbols[i], offsets[i]);
      }
      if (spec_.overlap == OverlapPolicy::kAllow || any_overlap(masks)) break;
      if (++retries > spec_.max_retries) fail();
    }
  }

  Rng bg_rng(seed, index, Slot::kSceneBackground);
  return finish(symbols, masks, offsets, draw(spec_.background, bg_rng));
}

SceneSample SceneComposer::compose_fixed(const std::vector<SymbolAttributes>& symbols,
                                         const std::vector<Eigen::Vector2d>& centers,
                                         const PatternSpec& background) const {
  if (symbols.size() != centers.size()) throw ConfigError("one centre per symbol required");
  std::vector<Placed> placed;
  std::vector<InstanceMask> masks;
  std::vector<Eigen::Vector2i> offsets;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    SymbolAttributes a = symbols[i];
    a.height = spec_.height;
    a.width = spec_.width;
    placed.push_back(prepare(a));
    offsets.emplace_back(static_cast<int>(std::floor(centers[i].x() + 0.5)),
                         static_cast<int>(std::floor(centers[i].y() + 0.5)));
    masks.push_back(raster_at(placed.back(), offsets.back()));
  }
  return finish(placed, masks, offsets, background);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_by_overlap(
    const std::vector<SceneSample>& scenes) {
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < scenes.size(); ++i)
    (scenes[i].overlap_flag ? out.second : out.first).push_back(i);
  return out;
}

}  // namespace symgen
