#include "lowlight/enhance.hpp"

#include <filesystem>

#include "lowlight/image_io.hpp"

namespace lowlight {

namespace {

// Reflect rows/columns (mirror without repeating the edge) until both
// dimensions are multiples of 8.
Image reflect_pad_to_multiple8(const Image& img) {
  const int ph = (8 - img.h % 8) % 8;
  const int pw = (8 - img.w % 8) % 8;
  if (ph == 0 && pw == 0) return img;
  if (img.h < 8 || img.w < 8)
    throw input_error("enhance: image must be at least 8x8");
  Image out(img.c, img.h + ph, img.w + pw);
  auto src_y = [&](int y) { return y < img.h ? y : 2 * img.h - 2 - y; };
  auto src_x = [&](int x) { return x < img.w ? x : 2 * img.w - 2 - x; };
  for (int c = 0; c < img.c; ++c)
    for (int y = 0; y < out.h; ++y)
      for (int x = 0; x < out.w; ++x)
        out.at(c, y, x) = img.at(c, src_y(y), src_x(x));
  return out;
}

Tensor crop_to(const Tensor& t, int h, int w) {
  if (t.h == h && t.w == w) return t;
  Tensor out(t.c, h, w);
  for (int c = 0; c < t.c; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = t.at(c, y, x);
  return out;
}

}  // namespace

EnhancementResult enhance(const ModelParams& params, const Image& y) {
  if (y.c != 3) throw input_error("enhance: input must have 3 channels");
  const Image padded = reflect_pad_to_multiple8(y);
  DecompositionTriple t = forward_one(params, padded);
  t.L = crop_to(t.L, y.h, y.w);
  t.R = crop_to(t.R, y.h, y.w);
  t.N = crop_to(t.N, y.h, y.w);

  Image enhanced(3, y.h, y.w);
  for (int c = 0; c < 3; ++c) {
    double* out = enhanced.plane(c);
    const double* r = t.R.plane(c);
    const double* l = t.L.plane(0);
    for (int i = 0; i < y.h * y.w; ++i)
      out[i] = std::clamp(r[i] * l[i], 0.0, 1.0);
  }
  return {std::move(enhanced), std::move(t)};
}

void decompose_to_files(const ModelParams& params, const Image& y,
                        const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  EnhancementResult res = enhance(params, y);

  Image n_vis(3, y.h, y.w);
  for (std::size_t i = 0; i < n_vis.size(); ++i)
    n_vis.v[i] = (res.triple.N.v[i] + 1.0) / 2.0;

  const auto dir = std::filesystem::path(out_dir);
  save_image(clipped(res.triple.L, 0.0, 1.0), (dir / "L.png").string());
  save_image(clipped(res.triple.R, 0.0, 1.0), (dir / "R.png").string());
  save_image(n_vis, (dir / "N.png").string());
  save_image(res.enhanced, (dir / "enhanced.png").string());
}

}  // namespace lowlight
