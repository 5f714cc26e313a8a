#include "symgen/truetype.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "symgen/errors.hpp"

namespace symgen {
namespace {

// Bounds-checked big-endian reads.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> d) : d_(d) {}

  std::uint8_t u8(std::size_t off) const {
    check(off, 1);
    return d_[off];
  }
  std::uint16_t u16(std::size_t off) const {
    check(off, 2);
    return static_cast<std::uint16_t>((d_[off] << 8) | d_[off + 1]);
  }
  std::int16_t i16(std::size_t off) const { return static_cast<std::int16_t>(u16(off)); }
  std::uint32_t u32(std::size_t off) const {
    check(off, 4);
    return (std::uint32_t{d_[off]} << 24) | (std::uint32_t{d_[off + 1]} << 16) |
           (std::uint32_t{d_[off + 2]} << 8) | std::uint32_t{d_[off + 3]};
  }
  double f2dot14(std::size_t off) const { return i16(off) / 16384.0; }
  std::size_t size() const { return d_.size(); }
  void check(std::size_t off, std::size_t len) const {
    if (off > d_.size() || len > d_.size() - off) throw FontParseError("read past end of font data");
  }

 private:
  std::span<const std::uint8_t> d_;
};

constexpr std::uint32_t tag(const char (&s)[5]) {
  return (std::uint32_t(std::uint8_t(s[0])) << 24) | (std::uint32_t(std::uint8_t(s[1])) << 16) |
         (std::uint32_t(std::uint8_t(s[2])) << 8) | std::uint32_t(std::uint8_t(s[3]));
}

std::string utf16be_to_utf8(const Reader& r, std::size_t off, std::size_t len) {
  std::string out;
  for (std::size_t i = 0; i + 1 < len; i += 2) {
    char32_t c = r.u16(off + i);
    if (c >= 0xD800 && c < 0xDC00 && i + 3 < len) {
      const char32_t lo = r.u16(off + i + 2);
      c = 0x10000 + ((c - 0xD800) << 10) + (lo - 0xDC00);
      i += 2;
    }
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if (c < 0x800) {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else if (c < 0x10000) {
      out += static_cast<char>(0xE0 | (c >> 12));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (c >> 18));
      out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

// Uniform subdivision with error bound |p0 - 2p1 + p2| / (8 n^2) <= tol.
void flatten_quad(const Point2<double>& p0, const Point2<double>& p1, const Point2<double>& p2,
                  double tol, std::vector<Point2<double>>& out) {
  const double dd = (p0 - 2.0 * p1 + p2).norm();
  const int n = std::clamp(static_cast<int>(std::ceil(std::sqrt(dd / (8.0 * tol)))), 1, 64);
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double u = 1.0 - t;
    out.push_back(u * u * p0 + 2.0 * u * t * p1 + t * t * p2);
  }
}

}  // namespace

TrueTypeFace TrueTypeFace::load(const std::filesystem::path& path, int face_index) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FontParseError("cannot open " + path.string());
  auto bytes = std::make_shared<std::vector<std::uint8_t>>(std::istreambuf_iterator<char>(in),
                                                           std::istreambuf_iterator<char>());
  return parse(std::move(bytes), face_index);
}

int TrueTypeFace::face_count(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.size() >= 12 && r.u32(0) == tag("ttcf")) return static_cast<int>(r.u32(8));
  return 1;
}

TrueTypeFace TrueTypeFace::parse(std::shared_ptr<const std::vector<std::uint8_t>> bytes,
                                 int face_index) {
  TrueTypeFace face;
  face.data_ = std::move(bytes);
  Reader r(*face.data_);
  if (r.size() < 12) throw FontParseError("file too small");
  std::uint32_t offset_table = 0;
  if (r.u32(0) == tag("ttcf")) {
    const auto n = r.u32(8);
    if (face_index < 0 || static_cast<std::uint32_t>(face_index) >= n)
      throw FontParseError("face index out of range");
    offset_table = r.u32(12 + 4 * static_cast<std::size_t>(face_index));
  } else if (face_index != 0) {
    throw FontParseError("face index out of range");
  }
  const auto version = r.u32(offset_table);
  if (version == tag("OTTO")) throw FontParseError("CFF outlines are not supported");
  if (version != 0x00010000 && version != tag("true"))
    throw FontParseError("not a TrueType font");
  face.read_tables(offset_table);
  face.read_names();
  face.read_cmap();
  return face;
}

void TrueTypeFace::read_tables(std::uint32_t offset_table) {
  Reader r(*data_);
  const auto num_tables = r.u16(offset_table + 4);
  for (std::uint16_t i = 0; i < num_tables; ++i) {
    const std::size_t rec = offset_table + 12 + 16 * std::size_t{i};
    const auto t = r.u32(rec);
    const auto off = r.u32(rec + 8);
    const auto len = r.u32(rec + 12);
    r.check(off, len);
    if (t == tag("glyf")) {
      glyf_ = off;
      glyf_len_ = len;
    } else if (t == tag("loca")) {
      loca_ = off;
      loca_len_ = len;
    } else if (t == tag("head")) {
      head_ = off;
    } else if (t == tag("maxp")) {
      maxp_ = off;
    } else if (t == tag("cmap")) {
      cmap_ = off;
    } else if (t == tag("name")) {
      name_ = off;
    } else if (t == tag("OS/2")) {
      os2_ = off;
    }
  }
  if (!head_ || !maxp_ || !cmap_) throw FontParseError("missing required table");
  if (!glyf_ || !loca_) throw FontParseError("no glyf outlines");
  units_per_em_ = r.u16(head_ + 18);
  if (units_per_em_ < 16) throw FontParseError("bad unitsPerEm");
  loca_format_ = r.i16(head_ + 50);
  num_glyphs_ = r.u16(maxp_ + 4);
  const auto mac_style = r.u16(head_ + 44);
  bold_ = mac_style & 1;
  italic_ = mac_style & 2;
  if (os2_) {
    weight_ = r.u16(os2_ + 4);
    const auto fs_selection = r.u16(os2_ + 62);
    bold_ = bold_ || (fs_selection & (1 << 5)) || weight_ >= 600;
    italic_ = italic_ || (fs_selection & 1) || (fs_selection & (1 << 9));
  } else if (bold_) {
    weight_ = 700;
  }
  const std::size_t need = static_cast<std::size_t>(num_glyphs_ + 1) * (loca_format_ ? 4 : 2);
  if (loca_len_ < need) throw FontParseError("loca table too short");
}

void TrueTypeFace::read_names() {
  if (!name_) return;
  Reader r(*data_);
  const auto count = r.u16(name_ + 2);
  const std::size_t strings = name_ + r.u16(name_ + 4);
  // Rank: Windows/US-English > any Windows > Mac Roman English.
  std::string best[18];
  int rank[18] = {};
  for (std::uint16_t i = 0; i < count; ++i) {
    const std::size_t rec = name_ + 6 + 12 * std::size_t{i};
    const auto platform = r.u16(rec), encoding = r.u16(rec + 2), lang = r.u16(rec + 4);
    const auto id = r.u16(rec + 6), len = r.u16(rec + 8), off = r.u16(rec + 10);
    if (id >= 18) continue;
    int score = 0;
    if (platform == 3 && (encoding == 1 || encoding == 10)) score = lang == 0x409 ? 3 : 2;
    else if (platform == 0) score = 2;
    else if (platform == 1 && encoding == 0 && lang == 0) score = 1;
    if (score <= rank[id]) continue;
    std::string s;
    if (platform == 1) {
      r.check(strings + off, len);
      for (std::size_t k = 0; k < len; ++k) s += static_cast<char>(r.u8(strings + off + k));
    } else {
      s = utf16be_to_utf8(r, strings + off, len);
    }
    if (s.empty()) continue;
    best[id] = std::move(s);
    rank[id] = score;
  }
  family_ = !best[16].empty() ? best[16] : best[1];
  style_ = !best[17].empty() ? best[17] : best[2];
}

void TrueTypeFace::read_cmap() {
  Reader r(*data_);
  const auto n = r.u16(cmap_ + 2);
  int best = 0;
  for (std::uint16_t i = 0; i < n; ++i) {
    const std::size_t rec = cmap_ + 4 + 8 * std::size_t{i};
    const auto platform = r.u16(rec), encoding = r.u16(rec + 2);
    const std::uint32_t sub = cmap_ + r.u32(rec + 4);
    const auto format = r.u16(sub);
    int score = 0;
    if (format == 12 && (platform == 3 || platform == 0)) score = 4;
    else if (format == 4 && (platform == 0 || (platform == 3 && encoding == 1))) score = 3;
    else if (format == 6 && (platform == 0 || platform == 3)) score = 2;
    else if ((format == 4 || format == 6 || format == 0) && platform == 3 && encoding == 0) score = 1;
    else if (format == 0 && platform == 1) score = 1;
    if (score > best) {
      best = score;
      cmap_sub_ = sub;
      cmap_format_ = format;
    }
  }
  if (!best) throw FontParseError("no usable cmap subtable");
}

std::uint16_t TrueTypeFace::glyph_index(char32_t cp) const {
  Reader r(*data_);
  const std::uint32_t s = cmap_sub_;
  switch (cmap_format_) {
    case 0:
      return cp < 256 ? r.u8(s + 6 + cp) : 0;
    case 6: {
      const auto first = r.u16(s + 6), count = r.u16(s + 8);
      if (cp < first || cp >= char32_t{first} + count) return 0;
      return r.u16(s + 10 + 2 * (cp - first));
    }
    case 4: {
      if (cp > 0xFFFF) return 0;
      const std::uint16_t seg_count = r.u16(s + 6) / 2;
      const std::uint32_t ends = s + 14;
      const std::uint32_t starts = ends + 2 * seg_count + 2;
      const std::uint32_t deltas = starts + 2 * seg_count;
      const std::uint32_t ranges = deltas + 2 * seg_count;
      std::uint32_t lo = 0, hi = seg_count;
      while (lo < hi) {
        const std::uint32_t mid = (lo + hi) / 2;
        if (r.u16(ends + 2 * mid) < cp) lo = mid + 1;
        else hi = mid;
      }
      if (lo >= seg_count) return 0;
      const auto start = r.u16(starts + 2 * lo);
      if (cp < start) return 0;
      const auto delta = r.u16(deltas + 2 * lo);
      const auto range = r.u16(ranges + 2 * lo);
      if (range == 0) return static_cast<std::uint16_t>(cp + delta);
      const std::size_t addr = ranges + 2 * lo + range + 2 * (cp - start);
      const auto g = r.u16(addr);
      return g ? static_cast<std::uint16_t>(g + delta) : 0;
    }
    case 12: {
      const auto groups = r.u32(s + 12);
      std::uint32_t lo = 0, hi = groups;
      while (lo < hi) {
        const std::uint32_t mid = lo + (hi - lo) / 2;
        const std::size_t g = s + 16 + 12 * std::size_t{mid};
        if (r.u32(g + 4) < cp) lo = mid + 1;
        else hi = mid;
      }
      if (lo >= groups) return 0;
      const std::size_t g = s + 16 + 12 * std::size_t{lo};
      const auto start = r.u32(g);
      if (cp < start) return 0;
      const auto id = r.u32(g + 8) + (cp - start);
      return id <= 0xFFFF ? static_cast<std::uint16_t>(id) : 0;
    }
    default:
      return 0;
  }
}

std::pair<std::uint32_t, std::uint32_t> TrueTypeFace::glyph_range(std::uint16_t glyph) const {
  if (glyph >= num_glyphs_) return {0, 0};
  Reader r(*data_);
  std::uint32_t a, b;
  if (loca_format_) {
    a = r.u32(loca_ + 4 * std::size_t{glyph});
    b = r.u32(loca_ + 4 * std::size_t{glyph} + 4);
  } else {
    a = 2u * r.u16(loca_ + 2 * std::size_t{glyph});
    b = 2u * r.u16(loca_ + 2 * std::size_t{glyph} + 2);
  }
  if (b < a || b > glyf_len_) throw FontParseError("bad loca entry");
  return {a, b};
}

bool TrueTypeFace::has_outline(std::uint16_t glyph) const {
  const auto [a, b] = glyph_range(glyph);
  if (b - a < 10) return false;
  Reader r(*data_);
  return r.i16(glyf_ + a) != 0;
}

void TrueTypeFace::collect_contours(std::uint16_t glyph, const Affine2<double>& t, int depth,
                                    std::vector<RawContour>& out) const {
  if (depth > 8) throw FontParseError("composite glyph nesting too deep");
  const auto [a, b] = glyph_range(glyph);
  if (b - a < 10) return;
  Reader r(*data_);
  const std::size_t g = glyf_ + a;
  const std::int16_t n_contours = r.i16(g);
  if (n_contours >= 0) {
    std::vector<std::uint16_t> end_pts(n_contours);
    for (int i = 0; i < n_contours; ++i) end_pts[i] = r.u16(g + 10 + 2 * i);
    const std::size_t n_points = n_contours ? std::size_t{end_pts.back()} + 1 : 0;
    std::size_t p = g + 10 + 2 * std::size_t(n_contours);
    p += 2 + r.u16(p);  // instructions
    std::vector<std::uint8_t> flags;
    flags.reserve(n_points);
    while (flags.size() < n_points) {
      const auto f = r.u8(p++);
      flags.push_back(f);
      if (f & 8) {
        const auto repeat = r.u8(p++);
        for (int k = 0; k < repeat && flags.size() < n_points; ++k) flags.push_back(f);
      }
    }
    std::vector<double> xs(n_points), ys(n_points);
    int v = 0;
    for (std::size_t i = 0; i < n_points; ++i) {
      const auto f = flags[i];
      if (f & 2) {
        const int d = r.u8(p++);
        v += (f & 16) ? d : -d;
      } else if (!(f & 16)) {
        v += r.i16(p);
        p += 2;
      }
      xs[i] = v;
    }
    v = 0;
    for (std::size_t i = 0; i < n_points; ++i) {
      const auto f = flags[i];
      if (f & 4) {
        const int d = r.u8(p++);
        v += (f & 32) ? d : -d;
      } else if (!(f & 32)) {
        v += r.i16(p);
        p += 2;
      }
      ys[i] = v;
    }
    std::size_t start = 0;
    for (int c = 0; c < n_contours; ++c) {
      const std::size_t end = end_pts[c];
      if (end < start || end >= n_points) throw FontParseError("bad contour end point");
      RawContour contour;
      for (std::size_t i = start; i <= end; ++i) {
        const Point2<double> q = t * Point2<double>(xs[i], ys[i]);
        contour.push_back({q.x(), q.y(), (flags[i] & 1) != 0});
      }
      out.push_back(std::move(contour));
      start = end + 1;
    }
    return;
  }
  // Composite glyph.
  std::size_t p = g + 10;
  for (;;) {
    const auto flags = r.u16(p);
    const auto child = r.u16(p + 2);
    p += 4;
    double dx = 0, dy = 0;
    if (flags & 1) {
      if (flags & 2) {
        dx = r.i16(p);
        dy = r.i16(p + 2);
      }
      p += 4;
    } else {
      if (flags & 2) {
        dx = static_cast<std::int8_t>(r.u8(p));
        dy = static_cast<std::int8_t>(r.u8(p + 1));
      }
      p += 2;
    }
    // Point-matching placement (flag 2 clear) is approximated by no offset.
    Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
    if (flags & 8) {
      m(0, 0) = m(1, 1) = r.f2dot14(p);
      p += 2;
    } else if (flags & 0x40) {
      m(0, 0) = r.f2dot14(p);
      m(1, 1) = r.f2dot14(p + 2);
      p += 4;
    } else if (flags & 0x80) {
      m(0, 0) = r.f2dot14(p);
      m(1, 0) = r.f2dot14(p + 2);
      m(0, 1) = r.f2dot14(p + 4);
      m(1, 1) = r.f2dot14(p + 6);
      p += 8;
    }
    Affine2<double> local = Affine2<double>::Identity();
    local.linear() = m;
    local.translation() = Eigen::Vector2d(dx, dy);
    collect_contours(child, t * local, depth + 1, out);
    if (!(flags & 0x20)) break;
  }
}

Outline TrueTypeFace::outline(std::uint16_t glyph) const {
  std::vector<RawContour> raw;
  collect_contours(glyph, Affine2<double>::Identity(), 0, raw);
  const double tol = units_per_em_ / 1024.0;
  Outline out;
  for (const auto& c : raw) {
    const std::size_t n = c.size();
    if (n < 2) continue;
    auto pt = [&](std::size_t i) { return Point2<double>(c[i % n].x, c[i % n].y); };
    // Start on an on-curve point, or on the midpoint of two off-curve points.
    std::size_t first = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (c[i].on_curve) {
        first = i;
        break;
      }
    }
    Point2<double> start;
    std::size_t begin;
    if (first == n) {
      start = 0.5 * (pt(0) + pt(1));
      begin = 1;
    } else {
      start = pt(first);
      begin = first + 1;
    }
    std::vector<Point2<double>> poly{start};
    Point2<double> cur = start;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = begin + k;
      const auto& rp = c[i % n];
      if (rp.on_curve) {
        cur = pt(i);
        poly.push_back(cur);
        continue;
      }
      const auto& nx = c[(i + 1) % n];
      const Point2<double> ctrl = pt(i);
      const Point2<double> end = nx.on_curve ? pt(i + 1) : Point2<double>(0.5 * (ctrl + pt(i + 1)));
      flatten_quad(cur, ctrl, end, tol, poly);
      cur = end;
      if (nx.on_curve) ++k;
    }
    // Drop the closing duplicate and zero-length edges.
    std::vector<Point2<double>> clean;
    for (const auto& q : poly) {
      if (clean.empty() || (q - clean.back()).squaredNorm() > 1e-12) clean.push_back(q);
    }
    while (clean.size() > 1 && (clean.front() - clean.back()).squaredNorm() <= 1e-12)
      clean.pop_back();
    if (clean.size() < 3) continue;
    Contour<double> m(2, static_cast<Eigen::Index>(clean.size()));
    for (std::size_t i = 0; i < clean.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = clean[i];
    out.contours.push_back(std::move(m));
  }
  return out;
}

}  // namespace symgen
