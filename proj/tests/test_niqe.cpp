#include <doctest.h>

#include <fstream>

#include "lowlight/image_io.hpp"
#include "lowlight/niqe.hpp"
#include "lowlight/noise_physics.hpp"
#include "testutil.hpp"

using namespace lowlight;

TEST_SUITE_BEGIN("niqe");

namespace {

std::vector<Image> pristine_corpus(int n, int size, std::uint64_t seed) {
  std::vector<Image> imgs;
  for (int i = 0; i < n; ++i)
    imgs.push_back(testutil::synth_image(seed + i, size, size));
  return imgs;
}

}  // namespace

TEST_CASE("fit requires at least 10 images") {
  CHECK_THROWS_AS(fit_niqe_model(pristine_corpus(3, 256, 1)), input_error);
}

TEST_CASE("fit is deterministic and the covariance is symmetric PSD-ish") {
  const auto corpus = pristine_corpus(10, 384, 5);
  const NiqeModel a = fit_niqe_model(corpus);
  const NiqeModel b = fit_niqe_model(corpus);
  CHECK(a.mean == b.mean);
  CHECK(a.covariance == b.covariance);

  for (int i = 0; i < kNiqeFeatureDim; ++i)
    for (int j = 0; j < kNiqeFeatureDim; ++j)
      CHECK(std::abs(a.covariance[i * kNiqeFeatureDim + j] -
                     a.covariance[j * kNiqeFeatureDim + i]) < 1e-9);
  // diagonal of a covariance cannot be negative
  for (int i = 0; i < kNiqeFeatureDim; ++i)
    CHECK(a.covariance[i * kNiqeFeatureDim + i] >= -1e-9);
}

TEST_CASE("degenerate corpus of identical images still fits") {
  std::vector<Image> same(10, testutil::synth_image(77, 256, 256));
  const NiqeModel model = fit_niqe_model(same);
  // zero variance everywhere, but the model is usable thanks to the ridge
  const double score = niqe(same[0], model);
  CHECK(std::isfinite(score));
}

TEST_CASE("niqe scoring: determinism, noise ordering, flip stability") {
  const auto corpus = pristine_corpus(10, 256, 100);
  const NiqeModel model = fit_niqe_model(corpus);

  const Image img = testutil::synth_image(200, 256, 256);
  const double s1 = niqe(img, model);
  const double s2 = niqe(img, model);
  CHECK(s1 == s2);
  CHECK(s1 >= 0.0);

  // heavy shot noise must score worse (higher)
  Image noisy = simulate_low_light(img, ExposureLevel(1.0), PhotonScale(10), 3);
  clip_(noisy, 0.0, 1.0);
  CHECK(niqe(noisy, model) > s1);

  // horizontal flip changes features only mildly
  Image flipped = img;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < img.h; ++y)
      for (int x = 0; x < img.w; ++x)
        flipped.at(c, y, x) = img.at(c, y, img.w - 1 - x);
  CHECK(niqe(flipped, model) == doctest::Approx(s1).epsilon(0.05));
}

TEST_CASE("pure noise sits farther from the model than a pristine image") {
  const auto corpus = pristine_corpus(10, 256, 300);
  const NiqeModel model = fit_niqe_model(corpus);
  const Image pristine = testutil::synth_image(310, 256, 256);
  const Image noise = testutil::random_tensor(311, 3, 256, 256);
  CHECK(niqe(pristine, model) < niqe(noise, model));
}

TEST_CASE("too-small images are rejected") {
  const auto corpus = pristine_corpus(10, 256, 400);
  const NiqeModel model = fit_niqe_model(corpus);
  CHECK_THROWS_AS(niqe(testutil::synth_image(1, 100, 100), model), input_error);
}

TEST_CASE("model file roundtrip is byte-stable") {
  testutil::TempDir tmp;
  const NiqeModel model = fit_niqe_model(pristine_corpus(10, 256, 500));
  save_niqe_model(model, tmp.str("m.niqe"));
  const NiqeModel back = load_niqe_model(tmp.str("m.niqe"));
  CHECK(back.mean == model.mean);
  CHECK(back.covariance == model.covariance);
  CHECK(back.patch == model.patch);
  CHECK(back.sharpness_quantile == model.sharpness_quantile);

  save_niqe_model(back, tmp.str("m2.niqe"));
  std::ifstream f1(tmp.str("m.niqe"), std::ios::binary);
  std::ifstream f2(tmp.str("m2.niqe"), std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), {});
  const std::string b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);

  std::ofstream(tmp.str("bad.niqe"), std::ios::binary) << "junk";
  CHECK_THROWS_AS(load_niqe_model(tmp.str("bad.niqe")), io_error);
}

TEST_SUITE_END();
