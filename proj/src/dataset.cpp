#include "lowlight/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>

#include "lowlight/image_io.hpp"
#include "lowlight/rng.hpp"

namespace fs = std::filesystem;

namespace lowlight {

namespace {

bool raster_extension(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return e == ".png" || e == ".jpg" || e == ".jpeg";
}

}  // namespace

std::map<std::string, std::string> list_raster_stems(const std::string& dir) {
  if (!fs::is_directory(dir))
    throw input_error("not a directory: " + dir);
  std::map<std::string, std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || !raster_extension(entry.path())) continue;
    stems[entry.path().stem().string()] = entry.path().string();
  }
  return stems;
}

std::vector<PairRef> scan_paired_dataset(const std::string& low_dir,
                                         const std::string& high_dir) {
  const auto low = list_raster_stems(low_dir);
  const auto high = list_raster_stems(high_dir);
  std::vector<PairRef> pairs;
  for (const auto& [stem, low_path] : low) {
    auto it = high.find(stem);
    if (it == high.end()) {
      std::cerr << "warning: '" << stem << "' has no counterpart in "
                << high_dir << "\n";
      continue;
    }
    pairs.push_back({stem, low_path, it->second});
  }
  for (const auto& [stem, path] : high) {
    if (!low.count(stem))
      std::cerr << "warning: '" << stem << "' has no counterpart in "
                << low_dir << "\n";
  }
  if (pairs.empty())
    throw input_error("no matching filename stems between " + low_dir +
                      " and " + high_dir);
  return pairs;  // std::map iteration is already sorted by stem
}

PairedSample load_pair(const PairRef& ref) {
  PairedSample s{load_image(ref.low_path), load_image(ref.high_path), ref.id};
  if (!s.low.same_shape(s.high))
    throw input_error("pair '" + ref.id + "': low and high shapes differ");
  return s;
}

PairedSample random_crop_pair(const PairedSample& sample, int size,
                              std::uint64_t seed) {
  const int h = sample.low.h, w = sample.low.w;
  if (size <= 0 || size > h || size > w)
    throw input_error("crop size " + std::to_string(size) +
                      " exceeds image size " + std::to_string(h) + "x" +
                      std::to_string(w));
  Rng rng(seed);
  const int oy = static_cast<int>(rng.uniform_int(h - size + 1));
  const int ox = static_cast<int>(rng.uniform_int(w - size + 1));

  auto crop = [&](const Image& src) {
    Image dst(src.c, size, size);
    for (int ci = 0; ci < src.c; ++ci)
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
          dst.at(ci, y, x) = src.at(ci, oy + y, ox + x);
    return dst;
  };
  return {crop(sample.low), crop(sample.high), sample.id};
}

}  // namespace lowlight
