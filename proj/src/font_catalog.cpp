#include "symgen/font_catalog.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <set>
#include <utility>

#include "symgen/errors.hpp"

namespace symgen {
namespace fs = std::filesystem;

namespace {

using Ranges = std::vector<std::pair<char32_t, char32_t>>;

std::vector<char32_t> expand(const Ranges& ranges) {
  std::vector<char32_t> out;
  for (auto [lo, hi] : ranges)
    for (char32_t c = lo; c <= hi; ++c) out.push_back(c);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct LanguageTable {
  std::vector<std::string> codes;
  std::map<std::string, std::vector<char32_t>, std::less<>> codepoints;

  void add(std::string code, const Ranges& ranges) {
    codes.push_back(code);
    codepoints.emplace(std::move(code), expand(ranges));
  }
};

// Letters only (no digits, punctuation, or combining marks). Unassigned
// code points inside the blocks are skipped explicitly.
const LanguageTable& table() {
  static const LanguageTable t = [] {
    LanguageTable l;
    l.add("english", {{U'a', U'z'}});
    l.add("greek", {{0x03B1, 0x03C1}, {0x03C3, 0x03C9}});
    l.add("cyrillic", {{0x0430, 0x044F}});
    l.add("armenian", {{0x0561, 0x0586}});
    l.add("hebrew", {{0x05D0, 0x05EA}});
    l.add("arabic", {{0x0621, 0x063A}, {0x0641, 0x064A}});
    l.add("hindi", {{0x0905, 0x0939}});
    l.add("bengali", {{0x0985, 0x098C}, {0x098F, 0x0990}, {0x0993, 0x09A8}, {0x09AA, 0x09B0},
                      {0x09B2, 0x09B2}, {0x09B6, 0x09B9}});
    l.add("gujarati", {{0x0A85, 0x0A8D}, {0x0A8F, 0x0A91}, {0x0A93, 0x0AA8}, {0x0AAA, 0x0AB0},
                       {0x0AB2, 0x0AB3}, {0x0AB5, 0x0AB9}});
    l.add("tamil", {{0x0B85, 0x0B8A}, {0x0B8E, 0x0B90}, {0x0B92, 0x0B95}, {0x0B99, 0x0B9A},
                    {0x0B9C, 0x0B9C}, {0x0B9E, 0x0B9F}, {0x0BA3, 0x0BA4}, {0x0BA8, 0x0BAA},
                    {0x0BAE, 0x0BB9}});
    l.add("telugu", {{0x0C05, 0x0C0C}, {0x0C0E, 0x0C10}, {0x0C12, 0x0C28}, {0x0C2A, 0x0C39}});
    l.add("thai", {{0x0E01, 0x0E2E}});
    l.add("georgian", {{0x10D0, 0x10F0}});
    l.add("khmer", {{0x1780, 0x17A2}});
    l.add("vietnamese", {{U'a', U'e'}, {U'g', U'i'}, {U'k', U'v'}, {U'x', U'y'}, {0x00E2, 0x00E2},
                         {0x00EA, 0x00EA}, {0x00F4, 0x00F4}, {0x0103, 0x0103}, {0x0111, 0x0111},
                         {0x01A1, 0x01A1}, {0x01B0, 0x01B0}});
    l.add("japanese", {{0x3041, 0x3096}, {0x30A1, 0x30FA}});
    l.add("chinese-simplified", {{0x4E00, 0x9FA5}});
    l.add("korean", {{0xAC00, 0xD7A3}});
    return l;
  }();
  return t;
}

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::set<std::string, std::less<>> read_blacklist(const fs::path& path) {
  std::set<std::string, std::less<>> out;
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw FontError("cannot read blacklist " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (!line.empty()) out.insert(line);
  }
  return out;
}

bool is_font_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".ttf" || ext == ".otf" || ext == ".ttc";
}

}  // namespace

const std::vector<std::string>& known_languages() { return table().codes; }

const std::vector<char32_t>& language_codepoints(std::string_view language) {
  const auto& t = table();
  const auto it = t.codepoints.find(language);
  if (it == t.codepoints.end()) throw FontError("unknown language '" + std::string(language) + "'");
  return it->second;
}

std::string to_utf8(char32_t c) {
  std::string out;
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
  return out;
}

char32_t from_utf8(std::string_view s) {
  if (s.empty()) throw ConfigError("empty symbol");
  const auto b0 = static_cast<unsigned char>(s[0]);
  std::size_t len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || s.size() != len) throw ConfigError("expected exactly one UTF-8 symbol: '" + std::string(s) + "'");
  char32_t c = len == 1 ? b0 : len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[i]);
    if ((b & 0xC0) != 0x80) throw ConfigError("invalid UTF-8 in '" + std::string(s) + "'");
    c = (c << 6) | (b & 0x3F);
  }
  return c;
}

struct FontCatalog::FaceCache {
  struct Entry {
    std::once_flag once;
    std::optional<TrueTypeFace> face;
    std::exception_ptr error;
  };
  explicit FaceCache(std::size_t n) : entries(n) {}
  std::vector<Entry> entries;
};

FontCatalog::FontCatalog() = default;
FontCatalog::FontCatalog(FontCatalog&&) noexcept = default;
FontCatalog& FontCatalog::operator=(FontCatalog&&) noexcept = default;
FontCatalog::~FontCatalog() = default;

FontCatalog FontCatalog::load(const fs::path& font_dir, const fs::path& blacklist) {
  return load(font_dir, blacklist, Options{});
}

FontCatalog FontCatalog::load(const fs::path& font_dir, const fs::path& blacklist_path,
                              Options options) {
  std::error_code ec;
  if (!fs::is_directory(font_dir, ec)) throw FontError("font directory not found: " + font_dir.string());
  const auto blacklist = read_blacklist(blacklist_path);

  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(
           font_dir, fs::directory_options::follow_directory_symlink |
                         fs::directory_options::skip_permission_denied);
       it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_regular_file(ec) && is_font_file(it->path())) files.push_back(it->path());
  }
  // Enumeration order is filesystem-dependent; everything below depends only
  // on the sorted list.
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });

  FontCatalog cat;
  cat.root_ = font_dir;
  cat.options_ = options;
  std::map<std::string, FontRecord> by_id;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    auto bytes = std::make_shared<std::vector<std::uint8_t>>(std::istreambuf_iterator<char>(in),
                                                             std::istreambuf_iterator<char>());
    const int faces = [&] {
      try {
        return TrueTypeFace::face_count(*bytes);
      } catch (const FontParseError&) {
        return 1;
      }
    }();
    for (int fi = 0; fi < faces; ++fi) {
      try {
        const auto face = TrueTypeFace::parse(bytes, fi);
        FontRecord rec;
        rec.path = file;
        rec.face_index = fi;
        rec.family = face.family().empty() ? file.stem().string() : face.family();
        rec.style = face.style().empty() ? "Regular" : face.style();
        rec.id = rec.family + " " + rec.style;
        rec.weight = face.weight();
        rec.bold_face = face.is_bold();
        rec.italic_face = face.is_italic();
        for (const auto& lang : known_languages()) {
          const auto& cps = language_codepoints(lang);
          if (std::all_of(cps.begin(), cps.end(), [&](char32_t c) { return face.has_glyph(c); }))
            rec.languages.push_back(lang);
        }
        std::sort(rec.languages.begin(), rec.languages.end());
        rec.blacklisted = blacklist.contains(rec.id) || blacklist.contains(rec.family);
        if (by_id.contains(rec.id)) {
          cat.warnings_.push_back("duplicate font id '" + rec.id + "' in " + file.string() +
                                  " (kept " + by_id[rec.id].path.string() + ")");
          continue;
        }
        by_id.emplace(rec.id, std::move(rec));
      } catch (const FontParseError& e) {
        cat.warnings_.push_back(file.string() + ": " + e.what());
      }
    }
  }
  if (by_id.empty()) throw FontError("no loadable fonts under " + font_dir.string());

  for (auto& [id, rec] : by_id) cat.fonts_.push_back(std::move(rec));
  for (auto& rec : cat.fonts_) {
    for (const auto& other : cat.fonts_) {
      if (other.family != rec.family || other.blacklisted) continue;
      if (other.bold_face && other.italic_face == rec.italic_face) rec.supports_bold = true;
      if (other.italic_face && other.bold_face == rec.bold_face) rec.supports_italic = true;
    }
  }
  cat.cache_ = std::make_unique<FaceCache>(cat.fonts_.size());
  return cat;
}

std::size_t FontCatalog::blacklisted_count() const {
  return static_cast<std::size_t>(
      std::count_if(fonts_.begin(), fonts_.end(), [](const FontRecord& f) { return f.blacklisted; }));
}

const FontRecord* FontCatalog::find(std::string_view id) const {
  const auto it = std::lower_bound(fonts_.begin(), fonts_.end(), id,
                                   [](const FontRecord& f, std::string_view k) { return f.id < k; });
  return it != fonts_.end() && it->id == id ? &*it : nullptr;
}

const FontRecord& FontCatalog::font(std::string_view id) const {
  if (const auto* f = find(id)) return *f;
  throw FontError("unknown font '" + std::string(id) + "'");
}

std::size_t FontCatalog::index_of(const FontRecord& font) const {
  const auto* base = fonts_.data();
  if (&font >= base && &font < base + fonts_.size()) return static_cast<std::size_t>(&font - base);
  const auto* f = find(font.id);
  if (!f) throw FontError("font '" + font.id + "' is not part of this catalog");
  return static_cast<std::size_t>(f - base);
}

std::vector<std::string> FontCatalog::fonts_for(std::string_view language) const {
  language_codepoints(language);
  std::vector<std::string> out;
  for (const auto& f : fonts_) {
    if (f.blacklisted) continue;
    if (std::binary_search(f.languages.begin(), f.languages.end(), language, std::less<>{}))
      out.push_back(f.id);
  }
  return out;
}

std::vector<std::string> FontCatalog::languages() const {
  std::vector<std::string> out;
  for (const auto& lang : known_languages())
    if (fonts_for(lang).size() >= options_.min_fonts_per_language) out.push_back(lang);
  return out;
}

Alphabet FontCatalog::alphabet(std::string_view language, std::optional<std::size_t> max_symbols,
                               std::optional<std::size_t> max_fonts) const {
  const auto& cps = language_codepoints(language);
  auto fonts = fonts_for(language);
  if (fonts.size() < options_.min_fonts_per_language) {
    throw FontError("language '" + std::string(language) + "' has " + std::to_string(fonts.size()) +
                    " eligible fonts (minimum " + std::to_string(options_.min_fonts_per_language) + ")");
  }
  Alphabet a;
  a.language = std::string(language);
  const std::size_t n = max_symbols ? std::min(*max_symbols, cps.size()) : cps.size();
  a.codepoints.assign(cps.begin(), cps.begin() + static_cast<std::ptrdiff_t>(n));
  if (max_fonts && fonts.size() > *max_fonts) fonts.resize(*max_fonts);
  a.fonts = std::move(fonts);
  if (a.codepoints.empty()) throw FontError("empty alphabet for '" + a.language + "'");
  return a;
}

const TrueTypeFace& FontCatalog::face(const FontRecord& font) const {
  auto& entry = cache_->entries[index_of(font)];
  const auto& rec = fonts_[index_of(font)];
  std::call_once(entry.once, [&] {
    try {
      entry.face.emplace(TrueTypeFace::load(rec.path, rec.face_index));
    } catch (...) {
      entry.error = std::current_exception();
    }
  });
  if (entry.error) std::rethrow_exception(entry.error);
  return *entry.face;
}

const FontRecord* FontCatalog::font_with_glyph(char32_t codepoint) const {
  for (const auto& f : fonts_) {
    if (f.blacklisted) continue;
    if (face(f).has_glyph(codepoint)) return &f;
  }
  return nullptr;
}

GlyphOutline FontCatalog::glyph_outline(const FontRecord& font, char32_t codepoint, bool bold,
                                        bool italic) const {
  const bool want_bold = bold || font.bold_face;
  const bool want_italic = italic || font.italic_face;

  // Closest native face of the family: exact style match first, then one
  // that matches the bold flag, then the requested face itself.
  const FontRecord* chosen = &font;
  int best = -1;
  for (const auto& f : fonts_) {
    if (f.family != font.family || f.blacklisted) continue;
    int score = 0;
    if (f.bold_face == want_bold) score += 2;
    if (f.italic_face == want_italic) score += 1;
    if (f.bold_face && !want_bold) continue;
    if (f.italic_face && !want_italic) continue;
    if (score < best) continue;
    if (score == best) {
      const int target = want_bold ? 700 : font.weight;
      if (std::abs(f.weight - target) >= std::abs(chosen->weight - target)) continue;
    }
    if (!face(f).has_glyph(codepoint)) continue;
    best = score;
    chosen = &f;
  }

  const auto& ttf = face(*chosen);
  const auto glyph = ttf.glyph_index(codepoint);
  if (glyph == 0 || !ttf.has_outline(glyph)) {
    throw FontError("font '" + chosen->id + "' has no glyph for U+" + [&] {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(codepoint));
      return std::string(buf);
    }());
  }
  GlyphOutline g;
  g.units_per_em = ttf.units_per_em();
  g.outline = ttf.outline(glyph);
  if (want_bold && !chosen->bold_face)
    g.outline = embolden(g.outline, kSyntheticBoldOffset * g.units_per_em);
  if (want_italic && !chosen->italic_face) g.outline = shear_x(g.outline, kSyntheticItalicShear);
  g.bbox = g.outline.bbox();
  if (g.outline.empty()) throw FontError("empty outline in '" + chosen->id + "'");
  return g;
}

nlohmann::json FontCatalog::summary() const {
  nlohmann::json fonts = nlohmann::json::array();
  for (const auto& f : fonts_) {
    fonts.push_back({{"id", f.id},
                     {"path", f.path.generic_string()},
                     {"face_index", f.face_index},
                     {"family", f.family},
                     {"style", f.style},
                     {"weight", f.weight},
                     {"bold_face", f.bold_face},
                     {"italic_face", f.italic_face},
                     {"supports_bold", f.supports_bold},
                     {"supports_italic", f.supports_italic},
                     {"languages", f.languages},
                     {"blacklisted", f.blacklisted}});
  }
  nlohmann::json langs = nlohmann::json::object();
  for (const auto& l : known_languages()) langs[l] = fonts_for(l).size();
  return {{"root", root_.generic_string()},
          {"fonts", fonts},
          {"font_count", fonts_.size()},
          {"blacklisted", blacklisted_count()},
          {"fonts_per_language", langs},
          {"languages", languages()},
          {"warnings", warnings_}};
}

}  // namespace symgen
