#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "symgen/geometry.hpp"
#include "symgen/truetype.hpp"

namespace symgen {

/// One face of one font file.
struct FontRecord {
  std::string id;  ///< "<family> <style>", unique within a catalog
  std::filesystem::path path;
  int face_index = 0;
  std::string family;
  std::string style;
  int weight = 400;
  bool bold_face = false;    ///< this face is itself bold
  bool italic_face = false;  ///< this face is itself italic/oblique
  bool supports_bold = false;    ///< family ships a native bold counterpart
  bool supports_italic = false;  ///< family ships a native italic counterpart
  std::vector<std::string> languages;  ///< fully covered alphabets, sorted
  bool blacklisted = false;
};

/// Ordered symbol set of one language. Class index = position in `codepoints`.
struct Alphabet {
  std::string language;
  std::vector<char32_t> codepoints;
  std::vector<std::string> fonts;  ///< eligible font ids, sorted
};

struct GlyphOutline {
  Outline outline;  ///< font units, y up
  Box2d bbox;
  int units_per_em = 0;
};

/// Built-in language table in Unicode scalar order.
const std::vector<std::string>& known_languages();
/// Full canonical codepoint list; throws FontError for unknown codes.
const std::vector<char32_t>& language_codepoints(std::string_view language);

std::string to_utf8(char32_t cp);
/// Decodes exactly one UTF-8 scalar; throws ConfigError otherwise.
char32_t from_utf8(std::string_view s);

/// Stroke offset (fraction of the em) applied when bold must be synthesized.
inline constexpr double kSyntheticBoldOffset = 0.025;
/// Horizontal shear applied when italic must be synthesized.
inline constexpr double kSyntheticItalicShear = 0.2;
/// Languages covered by fewer eligible fonts are not offered.
inline constexpr std::size_t kMinFontsPerLanguage = 10;

/// Immutable index of the fonts found under a directory. Font files are
/// re-read lazily (once, thread-safe) the first time a glyph is requested.
class FontCatalog {
 public:
  struct Options {
    std::size_t min_fonts_per_language = kMinFontsPerLanguage;
  };

  static FontCatalog load(const std::filesystem::path& font_dir,
                          const std::filesystem::path& blacklist = {});
  static FontCatalog load(const std::filesystem::path& font_dir,
                          const std::filesystem::path& blacklist, Options options);

  FontCatalog(FontCatalog&&) noexcept;
  FontCatalog& operator=(FontCatalog&&) noexcept;
  ~FontCatalog();

  /// All loaded faces (blacklisted included), sorted by id.
  const std::vector<FontRecord>& fonts() const { return fonts_; }
  std::size_t size() const { return fonts_.size(); }
  std::size_t blacklisted_count() const;
  const std::vector<std::string>& warnings() const { return warnings_; }
  const std::filesystem::path& root() const { return root_; }

  const FontRecord* find(std::string_view id) const;
  const FontRecord& font(std::string_view id) const;

  /// Non-blacklisted fonts covering `language`, sorted by id.
  std::vector<std::string> fonts_for(std::string_view language) const;
  /// Languages meeting the font-count threshold, in known_languages() order.
  std::vector<std::string> languages() const;

  Alphabet alphabet(std::string_view language,
                    std::optional<std::size_t> max_symbols = std::nullopt,
                    std::optional<std::size_t> max_fonts = std::nullopt) const;

  /// Outline of `codepoint` with bold/italic resolved to a native face of the
  /// same family when one exists, synthesized otherwise.
  GlyphOutline glyph_outline(const FontRecord& font, char32_t codepoint, bool bold,
                             bool italic) const;

  const TrueTypeFace& face(const FontRecord& font) const;
  /// First eligible font (id order) with a glyph for `codepoint`, if any.
  const FontRecord* font_with_glyph(char32_t codepoint) const;

  nlohmann::json summary() const;

 private:
  struct FaceCache;
  FontCatalog();
  std::size_t index_of(const FontRecord& font) const;

  std::filesystem::path root_;
  std::vector<FontRecord> fonts_;
  std::vector<std::string> warnings_;
  Options options_;
  std::unique_ptr<FaceCache> cache_;
};

}  // namespace symgen
