#pragma once

#include <string>

#include "lowlight/model.hpp"

namespace lowlight {

/// Inference output: the composed enhancement clip(R * broadcast(L), 0, 1)
/// and the raw decomposition it came from.
struct EnhancementResult {
  Image enhanced;
  DecompositionTriple triple;
};

/// Runs the model on a 3-channel image. Sizes not divisible by 8 are
/// reflect-padded (bottom/right) for the forward pass and cropped back, so
/// divisible inputs are untouched by padding.
EnhancementResult enhance(const ModelParams& params, const Image& y);

/// Writes L.png (grayscale), R.png, N.png (visualized as (N+1)/2) and
/// enhanced.png into out_dir.
void decompose_to_files(const ModelParams& params, const Image& y,
                        const std::string& out_dir);

}  // namespace lowlight
