#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lowlight/tensor.hpp"

namespace lowlight {

/// A low/normal-light pair sharing a filename stem. Both images have
/// identical height, width and channel count.
struct PairedSample {
  Image low;
  Image high;
  std::string id;
};

/// Paths of a pair on disk, before loading.
struct PairRef {
  std::string id;
  std::string low_path;
  std::string high_path;
};

/// Maps filename stem -> full path for every PNG/JPEG directly in `dir`.
std::map<std::string, std::string> list_raster_stems(const std::string& dir);

/// Scans `<low_dir>` and `<high_dir>` for raster files and returns the sorted
/// intersection of filename stems. Stems present on only one side are
/// reported on stderr. Throws input_error if the intersection is empty.
std::vector<PairRef> scan_paired_dataset(const std::string& low_dir,
                                         const std::string& high_dir);

/// Loads both sides of a pair and checks they have matching shapes.
PairedSample load_pair(const PairRef& ref);

/// Crops the same size x size window (offset drawn uniformly from the valid
/// range, deterministic per seed) out of both images.
PairedSample random_crop_pair(const PairedSample& sample, int size,
                              std::uint64_t seed);

}  // namespace lowlight
