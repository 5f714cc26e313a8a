#include <png.h>

#include <cstdio>
#include <vector>

#include "symgen/dataset.hpp"
#include "symgen/errors.hpp"

namespace symgen {

void write_png(const std::filesystem::path& path, const Image8& pixels, int channels) {
  if (channels != 1 && channels != 3) throw ConfigError("PNG needs 1 or 3 channels");
  const auto height = static_cast<png_uint_32>(pixels.rows());
  const auto width = static_cast<png_uint_32>(pixels.cols() / channels);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot create " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    std::fclose(f);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(f);
    throw IoError("cannot write " + path.string());
  }
  png_init_io(png, f);
  png_set_IHDR(png, info, width, height, 8, channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (png_uint_32 y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * pixels.cols()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(f) != 0) throw IoError("cannot write " + path.string());
}

}  // namespace symgen
