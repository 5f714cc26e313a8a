#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "symgen/geometry.hpp"

namespace symgen {

/// Read-only view of one face of a TrueType (glyf-outline) font file.
/// CFF-flavoured OpenType is rejected with FontParseError.
class TrueTypeFace {
 public:
  static TrueTypeFace load(const std::filesystem::path& path, int face_index = 0);
  static TrueTypeFace parse(std::shared_ptr<const std::vector<std::uint8_t>> bytes,
                            int face_index = 0);
  /// Number of faces in a file (1 for plain .ttf, n for collections).
  static int face_count(std::span<const std::uint8_t> bytes);

  std::uint16_t glyph_index(char32_t codepoint) const;
  /// True when the glyph has a non-empty outline record.
  bool has_outline(std::uint16_t glyph) const;
  bool has_glyph(char32_t codepoint) const {
    const auto g = glyph_index(codepoint);
    return g != 0 && has_outline(g);
  }
  /// Flattened outline in font units, y up.
  Outline outline(std::uint16_t glyph) const;

  int units_per_em() const { return units_per_em_; }
  int num_glyphs() const { return num_glyphs_; }
  const std::string& family() const { return family_; }
  const std::string& style() const { return style_; }
  int weight() const { return weight_; }
  bool is_bold() const { return bold_; }
  bool is_italic() const { return italic_; }

 private:
  struct RawPoint {
    double x, y;
    bool on_curve;
  };
  using RawContour = std::vector<RawPoint>;

  TrueTypeFace() = default;
  void read_tables(std::uint32_t offset_table);
  void read_names();
  void read_cmap();
  std::pair<std::uint32_t, std::uint32_t> glyph_range(std::uint16_t glyph) const;
  void collect_contours(std::uint16_t glyph, const Affine2<double>& t, int depth,
                        std::vector<RawContour>& out) const;

  std::shared_ptr<const std::vector<std::uint8_t>> data_;
  std::uint32_t glyf_ = 0, loca_ = 0, head_ = 0, maxp_ = 0, cmap_ = 0, name_ = 0, os2_ = 0;
  std::uint32_t glyf_len_ = 0, loca_len_ = 0;
  std::uint32_t cmap_sub_ = 0;  // absolute offset of chosen cmap subtable
  std::uint16_t cmap_format_ = 0;
  int units_per_em_ = 0, num_glyphs_ = 0, loca_format_ = 0;
  std::string family_, style_;
  int weight_ = 400;
  bool bold_ = false, italic_ = false;
};

}  // namespace symgen
