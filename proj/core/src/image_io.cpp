#include "hcoseg/image_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace hcoseg {

namespace {

namespace fs = std::filesystem;

struct FileHandle {
  std::FILE* fp = nullptr;
  ~FileHandle() {
    if (fp) std::fclose(fp);
  }
};

// Writers stage into "<path>.tmp" and rename, so failures never leave a
// partial file under the final name.
class AtomicWriter {
public:
  explicit AtomicWriter(const std::string& path)
      : final_path_(path), tmp_path_(path + ".tmp") {
    file_.fp = std::fopen(tmp_path_.c_str(), "wb");
    if (!file_.fp) raise(Errc::io, "cannot open for writing: " + tmp_path_);
  }

  ~AtomicWriter() {
    if (!committed_) {
      if (file_.fp) {
        std::fclose(file_.fp);
        file_.fp = nullptr;
      }
      std::error_code ec;
      fs::remove(tmp_path_, ec);
    }
  }

  std::FILE* fp() { return file_.fp; }

  void commit() {
    if (std::fclose(file_.fp) != 0) {
      file_.fp = nullptr;
      raise(Errc::io, "write failed: " + tmp_path_);
    }
    file_.fp = nullptr;
    std::error_code ec;
    fs::rename(tmp_path_, final_path_, ec);
    if (ec) raise(Errc::io, "cannot rename into place: " + final_path_);
    committed_ = true;
  }

private:
  std::string final_path_;
  std::string tmp_path_;
  FileHandle file_;
  bool committed_ = false;
};

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriter() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

// Decodes any PNG color type into packed RGB8 rows.
void decode_png_rgb8(const std::string& path, int& width, int& height,
                     std::vector<std::uint8_t>& rgb) {
  FileHandle file;
  file.fp = std::fopen(path.c_str(), "rb");
  if (!file.fp) raise(Errc::io, "cannot open: " + path);

  std::uint8_t sig[8];
  if (std::fread(sig, 1, 8, file.fp) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    raise(Errc::format, "not a PNG file: " + path);

  PngReader r;
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                 nullptr);
  if (!r.png) raise(Errc::io, "libpng allocation failed");
  r.info = png_create_info_struct(r.png);
  if (!r.info) raise(Errc::io, "libpng allocation failed");

  if (setjmp(png_jmpbuf(r.png)))
    raise(Errc::format, "corrupt PNG data: " + path);

  png_init_io(r.png, file.fp);
  png_set_sig_bytes(r.png, 8);
  png_read_info(r.png, r.info);

  png_uint_32 w = 0, h = 0;
  int bit_depth = 0, color_type = 0;
  png_get_IHDR(r.png, r.info, &w, &h, &bit_depth, &color_type, nullptr,
               nullptr, nullptr);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(r.png);
  if (png_get_valid(r.png, r.info, PNG_INFO_tRNS))
    png_set_tRNS_to_alpha(r.png);
  if (bit_depth == 16) png_set_strip_16(r.png);
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(r.png);
  png_set_strip_alpha(r.png);
  png_read_update_info(r.png, r.info);

  width = static_cast<int>(w);
  height = static_cast<int>(h);
  rgb.assign(static_cast<std::size_t>(width) * height * 3, 0);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y)
    rows[y] = rgb.data() + static_cast<std::size_t>(y) * width * 3;
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);
}

void encode_png(const std::string& path, int width, int height,
                int color_type, const std::uint8_t* data,
                std::size_t row_bytes) {
  AtomicWriter out(path);

  PngWriter w;
  w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                  nullptr);
  if (!w.png) raise(Errc::io, "libpng allocation failed");
  w.info = png_create_info_struct(w.png);
  if (!w.info) raise(Errc::io, "libpng allocation failed");

  if (setjmp(png_jmpbuf(w.png))) raise(Errc::io, "PNG encode failed: " + path);

  png_init_io(w.png, out.fp());
  png_set_compression_level(w.png, 6);  // pinned for reproducible bytes
  png_set_IHDR(w.png, w.info, width, height, 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);

  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y)
    rows[y] = const_cast<png_bytep>(data + y * row_bytes);
  png_write_image(w.png, rows.data());
  png_write_end(w.png, nullptr);
  out.commit();
}

inline std::uint32_t float_bits(float f) { return std::bit_cast<std::uint32_t>(f); }
inline float bits_float(std::uint32_t u) { return std::bit_cast<float>(u); }

}  // namespace

Frame read_frame_png(const std::string& path, int index) {
  Frame frame;
  frame.index = index;
  decode_png_rgb8(path, frame.width, frame.height, frame.pixels);
  return frame;
}

void write_frame_png(const Frame& frame, const std::string& path) {
  encode_png(path, frame.width, frame.height, PNG_COLOR_TYPE_RGB,
             frame.pixels.data(), static_cast<std::size_t>(frame.width) * 3);
}

BinaryMask read_mask_png(const std::string& path) {
  int w = 0, h = 0;
  std::vector<std::uint8_t> rgb;
  decode_png_rgb8(path, w, h, rgb);
  BinaryMask mask(w, h);
  for (std::size_t p = 0; p < mask.bits.size(); ++p) {
    int lum = (rgb[3 * p] + rgb[3 * p + 1] + rgb[3 * p + 2]) / 3;
    mask.bits[p] = lum >= 128 ? 1 : 0;
  }
  return mask;
}

void write_mask_png(const BinaryMask& mask, const std::string& path) {
  std::vector<std::uint8_t> gray(mask.bits.size());
  for (std::size_t p = 0; p < gray.size(); ++p)
    gray[p] = mask.bits[p] ? 255 : 0;
  encode_png(path, mask.width, mask.height, PNG_COLOR_TYPE_GRAY, gray.data(),
             static_cast<std::size_t>(mask.width));
}

ProbabilityMap read_map_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open: " + path);

  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  if (!in || magic != "Pf")
    raise(Errc::format, "malformed PFM header: " + path);
  if (w < 1 || h < 1)
    raise(Errc::format, "bad PFM dimensions in " + path);
  if (scale >= 0.0)
    raise(Errc::format, "big-endian PFM not supported: " + path);
  in.get();  // single whitespace byte terminating the header

  std::size_t count = static_cast<std::size_t>(w) * h;
  std::vector<std::uint8_t> raw(count * 4);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    raise(Errc::format, "truncated PFM payload: " + path);

  ProbabilityMap map(w, h);
  for (int row = 0; row < h; ++row) {
    int y = h - 1 - row;  // PFM stores rows bottom-up
    for (int x = 0; x < w; ++x) {
      std::size_t o = (static_cast<std::size_t>(row) * w + x) * 4;
      std::uint32_t u = static_cast<std::uint32_t>(raw[o]) |
                        (static_cast<std::uint32_t>(raw[o + 1]) << 8) |
                        (static_cast<std::uint32_t>(raw[o + 2]) << 16) |
                        (static_cast<std::uint32_t>(raw[o + 3]) << 24);
      float v = bits_float(u);
      if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
        raise(Errc::range,
              "PFM value outside [0,1] at (" + std::to_string(x) + "," +
                  std::to_string(y) + ") in " + path);
      map.at(x, y) = static_cast<double>(v);
    }
  }
  return map;
}

void write_map_pfm(const ProbabilityMap& map, const std::string& path) {
  AtomicWriter out(path);

  std::ostringstream header;
  header << "Pf\n" << map.width << " " << map.height << "\n-1.0\n";
  const std::string head = header.str();
  if (std::fwrite(head.data(), 1, head.size(), out.fp()) != head.size())
    raise(Errc::io, "write failed: " + path);

  std::vector<std::uint8_t> row(static_cast<std::size_t>(map.width) * 4);
  for (int y = map.height - 1; y >= 0; --y) {  // bottom-up
    for (int x = 0; x < map.width; ++x) {
      double v = map.at(x, y);
      if (!std::isfinite(v))
        raise(Errc::range, "non-finite map value cannot be serialized");
      std::uint32_t u = float_bits(static_cast<float>(v));
      std::size_t o = static_cast<std::size_t>(x) * 4;
      row[o] = static_cast<std::uint8_t>(u & 0xff);
      row[o + 1] = static_cast<std::uint8_t>((u >> 8) & 0xff);
      row[o + 2] = static_cast<std::uint8_t>((u >> 16) & 0xff);
      row[o + 3] = static_cast<std::uint8_t>((u >> 24) & 0xff);
    }
    if (std::fwrite(row.data(), 1, row.size(), out.fp()) != row.size())
      raise(Errc::io, "write failed: " + path);
  }
  out.commit();
}

}  // namespace hcoseg
