// Acceptance suite: one PASS/FAIL line per criterion. An optional argument
// runs only the criteria whose name contains it.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "support.hpp"
#include "symgen/dataset.hpp"
#include "symgen/errors.hpp"
#include "symgen/recipes.hpp"

using namespace symgen;
namespace fs = std::filesystem;
using Eigen::Vector2d;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

DatasetContainer make(const RecipeConfig& r, std::size_t n, std::uint64_t seed) {
  GenerateOptions opt;
  opt.workers = workers();
  opt.font_dir = test::font_dir();
  opt.blacklist = test::blacklist();
  return generate_dataset(r, test::catalog(), n, seed, opt);
}

DatasetContainer make(const std::string& recipe, std::size_t n, std::uint64_t seed) {
  return make(builtin_recipe(recipe), n, seed);
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

// Upper 1% points of the chi-square distribution.
double chi2_critical_99(int df) {
  static const double t[] = {0,      6.635,  9.210,  11.345, 13.277, 15.086, 16.812,
                             18.475, 20.090, 21.666, 23.209, 24.725, 26.217, 27.688,
                             29.141, 30.578, 32.000, 33.409, 34.805, 36.191, 37.566};
  if (df < 1 || df > 20) throw std::out_of_range("chi-square table");
  return t[df];
}

/// Pearson chi-square homogeneity statistic of two histograms and its df.
std::pair<double, int> chi2_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  double na = 0, nb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    na += a[k];
    nb += b[k];
  }
  double stat = 0;
  int bins = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double col = a[k] + b[k];
    if (col == 0) continue;
    ++bins;
    const double ea = col * na / (na + nb), eb = col * nb / (na + nb);
    stat += (a[k] - ea) * (a[k] - ea) / ea + (b[k] - eb) * (b[k] - eb) / eb;
  }
  return {stat, bins - 1};
}

// --------------------------------------------------------------------------

Outcome determinism() {
  const auto dir = test::scratch("acceptance_determinism");
  std::vector<DatasetContainer> runs;
  std::vector<double> secs;
  for (int w : {1, 1, 8}) {
    const auto out = dir / ("run" + std::to_string(runs.size()) + ".h5");
    const std::string cmd = std::string(SYMGEN_CLI) + " generate --recipe default --n 10000 --seed 7 --workers " +
                            std::to_string(w) + " --out " + out.string() + " --font-dir " +
                            test::font_dir().string() + " >/dev/null 2>&1";
    const auto t0 = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    secs.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "generate failed: " + cmd};
    runs.push_back(read_dataset(out));
  }
  bool same = true;
  for (std::size_t i = 1; i < runs.size(); ++i)
    same = same && runs[i].images == runs[0].images && runs[i].masks == runs[0].masks &&
           runs[i].attributes == runs[0].attributes;
  const double worst = *std::max_element(secs.begin(), secs.end());
  return {same && runs[0].n == 10000 && worst <= 60.0,
          std::string(same ? "identical" : "DIFFERENT") + " across workers {1,1,8}; slowest run " + fmt(worst, 1) +
              " s on " + std::to_string(std::thread::hardware_concurrency()) + " core(s)"};
}

Outcome split_ratios() {
  const auto p = split_iid(100000, kDefaultRatios, 1);
  check_partition(p, 100000);
  const bool ok = p.train.size() == 60000 && p.valid.size() == 20000 && p.test.size() == 20000;
  return {ok, "(" + std::to_string(p.train.size()) + ", " + std::to_string(p.valid.size()) + ", " +
                  std::to_string(p.test.size()) + ")"};
}

// Default-40k, shared by the stratified and compositional checks. Its first
// 10k samples are exactly Default-10k with the same seed.
const DatasetContainer& default_40k() {
  static const DatasetContainer c = make("default", 40000, 1);
  return c;
}

Outcome stratified() {
  const auto& full = default_40k();
  std::ostringstream detail;
  bool ok = true;
  for (const char* attr : {"rotation", "scale"}) {
    auto v = numeric_attribute(full, attr);
    v.resize(10000);
    const auto p = split_stratified_continuous(v);
    check_partition(p, v.size());
    const auto va = gather(v, p.valid), tr = gather(v, p.train), te = gather(v, p.test);
    const double va_max = *std::max_element(va.begin(), va.end());
    const double tr_min = *std::min_element(tr.begin(), tr.end());
    const double tr_max = *std::max_element(tr.begin(), tr.end());
    const double te_min = *std::min_element(te.begin(), te.end());
    const bool good = va_max < tr_min && tr_min <= tr_max && tr_max < te_min;
    ok = ok && good;
    detail << attr << ": " << fmt(va_max) << " < " << fmt(tr_min) << " <= " << fmt(tr_max) << " < " << fmt(te_min)
           << (good ? "" : " VIOLATED") << "; ";
  }
  return {ok, detail.str()};
}

Outcome compositional() {
  const auto& c = default_40k();
  const auto rot = numeric_attribute(c, "rotation"), scale = numeric_attribute(c, "scale");
  const auto p = split_compositional(rot, scale);
  check_partition(p, c.n);

  // Joint cells of the test set, recovered from rank quantiles.
  const int grid = p.params.value("grid", 5);
  auto bands = [&](const std::vector<double>& v) {
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    std::vector<int> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto rank = std::lower_bound(s.begin(), s.end(), v[i]) - s.begin();
      out[i] = static_cast<int>(rank * grid / static_cast<std::ptrdiff_t>(v.size()));
    }
    return out;
  };
  const auto ba = bands(rot), bb = bands(scale);
  std::set<std::pair<int, int>> test_cells;
  for (auto i : p.test) test_cells.insert({ba[i], bb[i]});
  std::size_t leaked = 0;
  for (auto i : p.train) leaked += test_cells.count({ba[i], bb[i]});

  const double ks_rot = ks_statistic(gather(rot, p.train), gather(rot, p.test));
  const double ks_scale = ks_statistic(gather(scale, p.train), gather(scale, p.test));
  const bool ok = leaked == 0 && ks_rot <= 0.15 && ks_scale <= 0.15;
  return {ok, "train samples in held-out cells: " + std::to_string(leaked) + "; KS rotation " + fmt(ks_rot) +
                  ", scale " + fmt(ks_scale) + "; sizes " + std::to_string(p.train.size()) + "/" +
                  std::to_string(p.valid.size()) + "/" + std::to_string(p.test.size())};
}

/// Dominant stroke orientation in [0, pi) from the Sobel structure tensor of
/// the whole image, summed over channels and over pixels inside the region.
/// Returns NaN when the region is empty away from the border.
double dominant_orientation(const Image8& img, const Mask8& m, bool foreground) {
  const int h = static_cast<int>(m.rows()), w = static_cast<int>(m.cols());
  double jxx = 0, jyy = 0, jxy = 0;
  int used = 0;
  for (int y = 1; y + 1 < h; ++y)
    for (int x = 1; x + 1 < w; ++x) {
      if (foreground ? m(y, x) != 255 : m(y, x) != 0) continue;
      ++used;
      for (int ch = 0; ch < 3; ++ch) {
        auto v = [&](int yy, int xx) { return static_cast<double>(img(yy, 3 * xx + ch)); };
        const double gx = (v(y - 1, x + 1) + 2 * v(y, x + 1) + v(y + 1, x + 1)) -
                          (v(y - 1, x - 1) + 2 * v(y, x - 1) + v(y + 1, x - 1));
        const double gy = (v(y + 1, x - 1) + 2 * v(y + 1, x) + v(y + 1, x + 1)) -
                          (v(y - 1, x - 1) + 2 * v(y - 1, x) + v(y - 1, x + 1));
        jxx += gx * gx;
        jyy += gy * gy;
        jxy += gx * gy;
      }
    }
  if (used == 0) return std::nan("");
  // Gradient direction; strokes run perpendicular to it.
  double theta = 0.5 * std::atan2(2 * jxy, jxx - jyy) + std::numbers::pi / 2;
  theta = std::fmod(theta + 2 * std::numbers::pi, std::numbers::pi);
  return theta;
}

Outcome camouflage() {
  const auto c = make("camouflage", 1000, 3);
  int chi_pass = 0, orient_pass = 0;
  for (std::size_t i = 0; i < c.n; ++i) {
    const auto img = c.image_array(i);
    const auto m = c.mask_array(i);
    bool all_channels = true;
    for (int ch = 0; ch < 3; ++ch) {
      std::vector<double> fg(8, 0), bg(8, 0);
      for (int y = 0; y < m.rows(); ++y)
        for (int x = 0; x < m.cols(); ++x) {
          const int bin = img(y, 3 * x + ch) / 32;
          if (m(y, x) == 255) fg[bin] += 1;
          if (m(y, x) == 0) bg[bin] += 1;
        }
      const auto [stat, df] = chi2_two_sample(fg, bg);
      if (df >= 1 && stat > chi2_critical_99(df)) all_channels = false;
    }
    chi_pass += all_channels;
    const double of = dominant_orientation(img, m, true), ob = dominant_orientation(img, m, false);
    if (std::isfinite(of) && std::isfinite(ob)) {
      double d = std::abs(of - ob);
      d = std::min(d, std::numbers::pi - d);
      orient_pass += d >= std::numbers::pi / 6;
    }
  }
  const double chi_rate = chi_pass / double(c.n), orient_rate = orient_pass / double(c.n);
  return {chi_rate >= 0.95 && orient_rate >= 0.95,
          "colour chi-square passes in " + fmt(100 * chi_rate, 1) + "% of images; orientation gap >= pi/6 in " +
              fmt(100 * orient_rate, 1) + "%"};
}

Outcome corruption_rates() {
  const std::size_t n = 100000;
  std::ostringstream detail;
  bool ok = true;
  auto report = [&](const char* what, double v, double target, double tol) {
    const bool good = within(v, target, tol);
    ok = ok && good;
    detail << what << " " << fmt(v) << (good ? "" : " OUT OF RANGE") << "; ";
  };
  {
    const auto c = make("al-label-noise", n, 11);
    std::size_t resampled = 0, changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      resampled += c.attribute(i)["corruption"]["label_resampled"].get<bool>();
      changed += c.labels.at("noisy")[i] != c.labels.at("clean")[i];
    }
    report("label corruption", resampled / double(n), 0.1, 0.003);
    detail << "(label changed " << fmt(changed / double(n)) << ") ";
  }
  {
    const auto c = make("al-pixel-noise", n, 12);
    std::size_t noised = 0;
    for (std::size_t i = 0; i < n; ++i) noised += c.attribute(i)["corruption"]["pixel_noise"].get<bool>();
    report("pixel-noised", noised / double(n), 0.5, 0.005);
  }
  {
    const auto c = make("al-missing", n, 13);
    std::size_t empty = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto* m = c.mask(i);
      empty += std::all_of(m, m + c.mask_bytes(), [](std::uint8_t v) { return v == 0; });
    }
    report("empty-mask", empty / double(n), 0.1, 0.003);
  }
  {
    const auto c = make("al-occluded", n, 14);
    std::size_t occluded = 0;
    for (std::size_t i = 0; i < n; ++i) occluded += !c.attribute(i)["corruption"]["occluders"].empty();
    report("occluded", occluded / double(n), 0.2, 0.004);
  }
  return {ok, detail.str()};
}

/// Independent placement oracle: the glyph outline's larger side is scaled
/// to scale * min(H, W), rotated counter-clockwise on screen about its box
/// centre, and its rotated box is positioned by extrapolating the slack
/// mapping (frame - box) / 2 * (1 + t). The glyph touches the border when its
/// extent reaches into the outermost pixel ring.
bool oracle_touches_border(const nlohmann::json& rec) {
  const auto& cat = test::catalog();
  const auto a = attributes_from_json(rec);
  const auto g = cat.glyph_outline(cat.font(a.font), a.character, a.bold, a.italic);
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& c : g.outline.contours)
    for (Eigen::Index k = 0; k < c.cols(); ++k) {
      x0 = std::min(x0, c(0, k));
      x1 = std::max(x1, c(0, k));
      y0 = std::min(y0, c(1, k));
      y1 = std::max(y1, c(1, k));
    }
  const double h = a.height, w = a.width;
  const double k = a.scale * std::min(h, w) / std::max(x1 - x0, y1 - y0);
  const double cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
  const double cs = std::cos(a.rotation), sn = std::sin(a.rotation);
  std::vector<std::vector<Vector2d>> polys;
  for (const auto& c : g.outline.contours) {
    auto& poly = polys.emplace_back();
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      // Font units are y-up; screen is y-down. A counter-clockwise turn on
      // screen is a counter-clockwise turn in font space before the flip.
      const double u = (c(0, j) - cx) * k, v = (c(1, j) - cy) * k;
      const double ru = cs * u - sn * v, rv = sn * u + cs * v;
      poly.emplace_back(ru, -rv);
    }
  }
  double px0 = 1e300, px1 = -1e300, py0 = 1e300, py1 = -1e300;
  for (const auto& poly : polys)
    for (const auto& p : poly) {
      px0 = std::min(px0, p.x());
      px1 = std::max(px1, p.x());
      py0 = std::min(py0, p.y());
      py1 = std::max(py1, p.y());
    }
  const double bw = px1 - px0, bh = py1 - py0;
  const double left = (w - bw) / 2 * (1 + a.translation.x());
  const double top = (h - bh) / 2 * (1 + a.translation.y());
  if (!(left < 1 || left + bw > w - 1 || top < 1 || top + bh > h - 1)) return false;
  for (auto& poly : polys)
    for (auto& p : poly) p += Vector2d(left - px0, top - py0);

  // Nonzero winding rule, sampled 8x8 inside each border pixel.
  auto inside = [&](double x, double y) {
    int wn = 0;
    for (const auto& poly : polys)
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vector2d& p = poly[i];
        const Vector2d& q = poly[(i + 1) % poly.size()];
        const double cross = (q.x() - p.x()) * (y - p.y()) - (x - p.x()) * (q.y() - p.y());
        if (p.y() <= y && q.y() > y && cross > 0) ++wn;
        if (p.y() > y && q.y() <= y && cross < 0) --wn;
      }
    return wn != 0;
  };
  auto pixel_hit = [&](int px, int py) {
    for (int sy = 0; sy < 8; ++sy)
      for (int sx = 0; sx < 8; ++sx)
        if (inside(px + (sx + 0.5) / 8, py + (sy + 0.5) / 8)) return true;
    return false;
  };
  const int ih = static_cast<int>(h), iw = static_cast<int>(w);
  for (int x = 0; x < iw; ++x)
    if (pixel_hit(x, 0) || pixel_hit(x, ih - 1)) return true;
  for (int y = 1; y + 1 < ih; ++y)
    if (pixel_hit(0, y) || pixel_hit(iw - 1, y)) return true;
  return false;
}

Outcome cropped() {
  const std::size_t n = 10000;
  const auto c = make("al-cropped", n, 21);
  std::size_t touches = 0, predicted = 0, outside = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = c.mask_array(i);
    const int h = c.height, w = c.width;
    const bool t = (m.row(0) > 0).any() || (m.row(h - 1) > 0).any() || (m.col(0) > 0).any() ||
                   (m.col(w - 1) > 0).any();
    touches += t;
    const auto rec = c.attribute(i);
    predicted += oracle_touches_border(rec);
    outside += std::max(std::abs(rec["translation"][0].get<double>()), std::abs(rec["translation"][1].get<double>())) > 1;
  }
  const double measured = touches / double(n), oracle = predicted / double(n);
  return {within(measured, oracle, 0.02) && outside > 0,
          "border-touching fraction " + fmt(measured) + " vs oracle " + fmt(oracle) + "; |t| > 1 in " +
              fmt(outside / double(n)) + " of samples"};
}

Outcome counting() {
  const std::size_t n = 10000;
  const Renderer renderer(test::catalog());
  std::ostringstream detail;
  bool ok = true;

  // Count uniformity per recipe (chi-square goodness of fit at 1%).
  double var_median = 0, var_sd = 0, target_frac = 0;
  const std::pair<const char*, std::uint64_t> recipes[] = {
      {"counting-fixed", 31}, {"counting-variable", 32}, {"counting-crowded", 33}};
  for (const auto& [name, seed] : recipes) {
    const auto r = builtin_recipe(name);
    const auto alphabets = resolve_alphabets(r, test::catalog());
    const SceneComposer composer(renderer, alphabets.front(), *r.scene);
    const int lo = r.scene->count.lo, hi = r.scene->count.hi;
    std::vector<double> hist(static_cast<std::size_t>(hi - lo + 1), 0);
    std::vector<double> log_ratios, scales;
    std::size_t symbols = 0, targets = 0, count_errors = 0, fixed_errors = 0;
    const std::size_t scenes = std::string(name) == "counting-crowded" ? 2000 : n;
    for (std::size_t i = 0; i < scenes; ++i) {
      const auto s = composer.compose(seed, i);
      const int k = static_cast<int>(s.instances.size());
      if (k < lo || k > hi) {
        ++count_errors;
        continue;
      }
      hist[static_cast<std::size_t>(k - lo)] += 1;
      symbols += k;
      for (int j = 0; j < k; ++j) {
        targets += s.codepoints[j] == r.scene->target;
        scales.push_back(s.attributes[j].scale);
        log_ratios.push_back(std::log(s.attributes[j].scale / 0.1));
        fixed_errors += s.attributes[j].scale != 0.1;
      }
      count_errors += s.target_count != std::count(s.codepoints.begin(), s.codepoints.end(), r.scene->target);
    }
    const double expected = double(scenes) / hist.size();
    double chi = 0;
    for (double h : hist) chi += (h - expected) * (h - expected) / expected;
    const bool uniform = chi <= chi2_critical_99(static_cast<int>(hist.size()) - 1);
    ok = ok && uniform && count_errors == 0;
    detail << name << ": counts chi2 " << fmt(chi, 2) << " (df " << hist.size() - 1 << ", " << scenes << " scenes)"
           << (uniform ? "" : " NOT UNIFORM") << (count_errors ? " COUNT ERRORS" : "");
    if (std::string(name) == "counting-fixed") {
      ok = ok && fixed_errors == 0;
      detail << ", scale 0.1 " << (fixed_errors ? "VIOLATED" : "exact");
    }
    if (std::string(name) == "counting-variable") {
      std::sort(scales.begin(), scales.end());
      var_median = scales[scales.size() / 2];
      double mean = 0;
      for (double v : log_ratios) mean += v;
      mean /= log_ratios.size();
      double ss = 0;
      for (double v : log_ratios) ss += (v - mean) * (v - mean);
      var_sd = std::sqrt(ss / (log_ratios.size() - 1));
      target_frac = targets / double(symbols);
      const bool law = var_median >= 0.097 && var_median <= 0.103 && var_sd >= 0.47 && var_sd <= 0.53;
      const bool tf = within(target_frac, 0.7, 0.014);
      ok = ok && law && tf;
      detail << ", target fraction " << fmt(target_frac) << (tf ? "" : " OUT OF RANGE") << ", scale median "
             << fmt(var_median) << ", sd(ln(scale/0.1)) " << fmt(var_sd) << (law ? "" : " OUT OF RANGE");
    }
    detail << "; ";
  }

  // Stored overlap labels against a brute-force pairwise oracle on the
  // stored instance masks.
  const auto c = make("counting-variable", 500, 32);
  const auto& im = c.instance_masks;
  std::size_t mismatches = 0, overlapping = 0;
  for (std::size_t i = 0; i < c.n; ++i) {
    std::vector<Mask8> dense;
    for (auto k = im.offsets[i]; k < im.offsets[i + 1]; ++k) {
      const auto* b = &im.boxes[4 * k];
      Mask8 d = Mask8::Zero(c.height, c.width);
      const auto* px = im.data.data() + im.pixel_offsets[k];
      for (int y = 0; y < b[3]; ++y)
        for (int x = 0; x < b[2]; ++x) {
          const int fx = b[0] + x, fy = b[1] + y;
          if (fx >= 0 && fy >= 0 && fx < c.width && fy < c.height) d(fy, fx) = px[y * b[2] + x];
        }
      dense.push_back(std::move(d));
    }
    bool any = false;
    for (std::size_t a = 0; a < dense.size() && !any; ++a)
      for (std::size_t b = a + 1; b < dense.size() && !any; ++b)
        for (int y = 0; y < c.height && !any; ++y)
          for (int x = 0; x < c.width && !any; ++x) any = dense[a](y, x) >= 128 && dense[b](y, x) >= 128;
    overlapping += any;
    mismatches += any != (c.labels.at("overlap")[i] != 0);
  }
  ok = ok && mismatches == 0;
  detail << "overlap flags vs brute force on 500 scenes: " << mismatches << " mismatches (" << overlapping
         << " overlapping)";
  return {ok, detail.str()};
}

Outcome fewshot() {
  const auto r = builtin_recipe("fewshot-multilingual");
  const auto& cat = test::catalog();
  const auto alphabets = resolve_alphabets(r, cat);
  std::size_t symbols = 0;
  std::set<std::string> fonts;
  bool caps = true;
  std::ostringstream detail;
  for (const auto& a : alphabets) {
    caps = caps && a.codepoints.size() <= 200 && a.fonts.size() <= 200;
    symbols += a.codepoints.size();
    fonts.insert(a.fonts.begin(), a.fonts.end());
    detail << a.language << " " << a.codepoints.size() << "/" << a.fonts.size() << ", ";
  }
  // The generated records respect the same caps.
  const auto c = make(r, 5000, 41);
  std::map<std::string, std::set<std::string>> chars, used_fonts;
  for (std::size_t i = 0; i < c.n; ++i) {
    const auto rec = c.attribute(i);
    chars[rec["language"]].insert(rec["char"].get<std::string>());
    used_fonts[rec["language"]].insert(rec["font"].get<std::string>());
  }
  for (const auto& [lang, s] : chars) caps = caps && s.size() <= 200 && used_fonts[lang].size() <= 200;
  const bool ok = caps && alphabets.size() >= 3 && chars.size() >= 3;
  detail << "total " << symbols << " symbols, " << fonts.size() << " fonts over " << alphabets.size()
         << " languages";
  if (cat.size() < 1000) detail << " (full-size totals need a corpus of 1000+ fonts; " << cat.size() << " fonts here)";
  return {ok, detail.str()};
}

Outcome io_roundtrip() {
  const auto dir = test::scratch("acceptance_io");
  const auto c = make("default", 1000, 51);
  bool ok = true;
  std::ostringstream detail;
  for (const char* ext : {".h5", ".npz"}) {
    const auto p = dir / (std::string("d") + ext);
    write_dataset(c, p);
    const auto back = read_dataset(p);
    const bool eq = back.equal_payload(c) && back.splits == c.splits && back.manifest == c.manifest;
    const auto regen = regenerate(back.manifest, test::catalog(), workers());
    bool hashes = true;
    for (const char* f : {"images", "masks", "attributes", "labels/clean", "labels/noisy"})
      hashes = hashes && regen.payload_hash(f) == c.payload_hash(f);
    ok = ok && eq && hashes;
    detail << ext << ": round trip " << (eq ? "equal" : "DIFFERS") << ", regeneration "
           << (hashes ? "matches" : "MISMATCH") << "; ";
  }
  return {ok, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string filter = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> criteria{
      {"determinism", determinism},
      {"split-ratios", split_ratios},
      {"stratified-boundary", stratified},
      {"compositional-hole", compositional},
      {"camouflage-invariance", camouflage},
      {"corruption-rates", corruption_rates},
      {"cropped-oracle", cropped},
      {"counting-scenes", counting},
      {"fewshot-caps", fewshot},
      {"io-roundtrip", io_roundtrip},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << "  " << o.detail << " [" << fmt(secs, 1) << " s]"
              << std::endl;
  }
  return failed ? 1 : 0;
}
