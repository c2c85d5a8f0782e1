#include "lowlight/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

namespace lowlight {

namespace {

enum class RasterFormat { png, jpeg, unknown };

RasterFormat sniff_format(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw io_error("cannot open image file: " + path);
  std::array<unsigned char, 8> magic{};
  const std::size_t n = std::fread(magic.data(), 1, magic.size(), f);
  std::fclose(f);
  static const std::array<unsigned char, 8> png_sig = {0x89, 'P',  'N',  'G',
                                                       0x0d, 0x0a, 0x1a, 0x0a};
  if (n >= 8 && std::memcmp(magic.data(), png_sig.data(), 8) == 0)
    return RasterFormat::png;
  if (n >= 2 && magic[0] == 0xff && magic[1] == 0xd8) return RasterFormat::jpeg;
  return RasterFormat::unknown;
}

Image from_interleaved(const unsigned char* buf, int h, int w, int c) {
  Image img(c, h, w);
  for (int ci = 0; ci < c; ++ci) {
    double* plane = img.plane(ci);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        plane[y * w + x] = buf[(y * w + x) * c + ci] / 255.0;
  }
  return img;
}

std::vector<unsigned char> to_interleaved(const Image& img) {
  std::vector<unsigned char> buf(img.size());
  const int h = img.h, w = img.w, c = img.c;
  for (int ci = 0; ci < c; ++ci) {
    const double* plane = img.plane(ci);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double v = std::clamp(plane[y * w + x], 0.0, 1.0);
        buf[(y * w + x) * c + ci] =
            static_cast<unsigned char>(std::lround(v * 255.0));
      }
  }
  return buf;
}

Image load_png(const std::string& path) {
  png_image im{};
  im.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&im, path.c_str()))
    throw io_error("PNG read failed for " + path + ": " + im.message);
  const bool color = (im.format & PNG_FORMAT_FLAG_COLOR) != 0;
  im.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (im.width == 0 || im.height == 0) {
    png_image_free(&im);
    throw io_error("zero-sized image: " + path);
  }
  std::vector<unsigned char> buf(PNG_IMAGE_SIZE(im));
  const png_color black{0, 0, 0};
  if (!png_image_finish_read(&im, &black, buf.data(), 0, nullptr)) {
    const std::string msg = im.message;
    png_image_free(&im);
    throw io_error("PNG decode failed for " + path + ": " + msg);
  }
  return from_interleaved(buf.data(), static_cast<int>(im.height),
                          static_cast<int>(im.width), color ? 3 : 1);
}

void save_png(const Image& img, const std::string& path) {
  png_image im{};
  im.version = PNG_IMAGE_VERSION;
  im.width = static_cast<png_uint_32>(img.w);
  im.height = static_cast<png_uint_32>(img.h);
  im.format = img.c == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const auto buf = to_interleaved(img);
  if (!png_image_write_to_file(&im, path.c_str(), 0, buf.data(), 0, nullptr))
    throw io_error("PNG write failed for " + path + ": " + im.message);
}

struct JpegErr {
  jpeg_error_mgr pub;
  std::jmp_buf jb;
  char msg[JMSG_LENGTH_MAX];
};

void jpeg_err_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->msg);
  std::longjmp(err->jb, 1);
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image load_jpeg(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw io_error("cannot open image file: " + path);

  jpeg_decompress_struct cinfo{};
  JpegErr jerr{};
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_err_exit;
  if (setjmp(jerr.jb)) {
    jpeg_destroy_decompress(&cinfo);
    throw io_error("JPEG decode failed for " + path + ": " + jerr.msg);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f.get());
  jpeg_read_header(&cinfo, TRUE);
  const bool gray = cinfo.num_components == 1;
  cinfo.out_color_space = gray ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const int h = static_cast<int>(cinfo.output_height);
  const int w = static_cast<int>(cinfo.output_width);
  const int c = cinfo.output_components;
  if (h == 0 || w == 0) {
    jpeg_destroy_decompress(&cinfo);
    throw io_error("zero-sized image: " + path);
  }
  std::vector<unsigned char> buf(static_cast<std::size_t>(h) * w * c);
  while (cinfo.output_scanline < cinfo.output_height) {
    unsigned char* row = buf.data() +
                         static_cast<std::size_t>(cinfo.output_scanline) * w * c;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_interleaved(buf.data(), h, w, c);
}

void save_jpeg(const Image& img, const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw io_error("cannot open for writing: " + path);

  jpeg_compress_struct cinfo{};
  JpegErr jerr{};
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_err_exit;
  if (setjmp(jerr.jb)) {
    jpeg_destroy_compress(&cinfo);
    throw io_error("JPEG write failed for " + path + ": " + jerr.msg);
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, f.get());
  cinfo.image_width = static_cast<JDIMENSION>(img.w);
  cinfo.image_height = static_cast<JDIMENSION>(img.h);
  cinfo.input_components = img.c;
  cinfo.in_color_space = img.c == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, 95, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const auto buf = to_interleaved(img);
  while (cinfo.next_scanline < cinfo.image_height) {
    const unsigned char* row =
        buf.data() + static_cast<std::size_t>(cinfo.next_scanline) * img.w * img.c;
    JSAMPROW rows[1] = {const_cast<unsigned char*>(row)};
    jpeg_write_scanlines(&cinfo, rows, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

bool ends_with_ci(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    const char a = s[s.size() - suffix.size() + i];
    if (std::tolower(static_cast<unsigned char>(a)) != suffix[i]) return false;
  }
  return true;
}

}  // namespace

Image load_image(const std::string& path) {
  switch (sniff_format(path)) {
    case RasterFormat::png:
      return load_png(path);
    case RasterFormat::jpeg:
      return load_jpeg(path);
    default:
      throw io_error("unsupported image format (expected PNG or JPEG): " + path);
  }
}

void save_image(const Image& img, const std::string& path) {
  if (img.c != 1 && img.c != 3)
    throw input_error("save_image: channel count must be 1 or 3");
  if (img.h <= 0 || img.w <= 0) throw input_error("save_image: empty image");
  if (ends_with_ci(path, ".png"))
    save_png(img, path);
  else if (ends_with_ci(path, ".jpg") || ends_with_ci(path, ".jpeg"))
    save_jpeg(img, path);
  else
    throw io_error("unsupported output extension (use .png/.jpg/.jpeg): " + path);
}

}  // namespace lowlight
