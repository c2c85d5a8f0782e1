#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lowlight/image_io.hpp"
#include "lowlight/metrics.hpp"
#include "lowlight/noise_physics.hpp"
#include "testutil.hpp"

using namespace lowlight;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("psnr: sentinel, closed form, brute-force equivalence") {
  const Image a = testutil::synth_image(1, 16, 16);
  CHECK(std::isinf(psnr(a, a)));

  const Image zero(3, 8, 8, 0.0);
  const Image half(3, 8, 8, 0.5);
  CHECK(psnr(zero, half) == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-10));
  CHECK(psnr(zero, half) == doctest::Approx(6.0206).epsilon(1e-4));

  const Image u = testutil::random_tensor(2, 3, 8, 8);
  const Image v = testutil::random_tensor(3, 3, 8, 8);
  double mse = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    mse += (u.v[i] - v.v[i]) * (u.v[i] - v.v[i]);
  mse /= static_cast<double>(u.size());
  CHECK(std::abs(psnr(u, v) - 10.0 * std::log10(1.0 / mse)) < 1e-10);

  CHECK_THROWS_AS(psnr(u, Image(3, 9, 8, 0.0)), input_error);
}

TEST_CASE("psnr strictly decreases as additive noise grows") {
  const Image clean = testutil::synth_image(4, 48, 48);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    double prev = std::numeric_limits<double>::infinity();
    int level = 0;
    for (double sigma : {0.01, 0.05, 0.1}) {
      Rng rng(derive_stream(seed, "awgn", level++));
      Image noisy = clean;
      for (double& x : noisy.v)
        x = std::clamp(x + sigma * rng.normal(), 0.0, 1.0);
      const double p = psnr(noisy, clean);
      CHECK(p < prev);
      prev = p;
    }
  }
}

TEST_CASE("ssim: identity, symmetry, negative case, noise monotonicity") {
  const Image x = testutil::synth_image(5, 32, 32);
  CHECK(ssim(x, x) == doctest::Approx(1.0).epsilon(1e-12));

  const Image y = testutil::synth_image(6, 32, 32);
  CHECK(std::abs(ssim(x, y) - ssim(y, x)) < 1e-10);

  // binary half-black/half-white image against its inverse
  Image bw(1, 32, 32, 0.0);
  for (int i = 16; i < 32; ++i)
    for (int j = 0; j < 32; ++j) bw.at(0, i, j) = 1.0;
  Image inv = bw;
  for (double& v : inv.v) v = 1.0 - v;
  CHECK(ssim(bw, inv) < 0.0);

  double prev = 1.0;
  int level = 0;
  for (double sigma : {0.01, 0.05, 0.1}) {
    Rng rng(derive_stream(42, "ssim-noise", level++));
    Image noisy = x;
    for (double& v : noisy.v) v = std::clamp(v + sigma * rng.normal(), 0.0, 1.0);
    const double s = ssim(x, noisy);
    CHECK(s < prev);
    prev = s;
  }

  CHECK_THROWS_AS(ssim(Image(1, 8, 8, 0.1), Image(1, 8, 8, 0.1)), input_error);
}

TEST_CASE("color_divergence: gray zero, one-hot channels, shuffle invariance") {
  Image gray(3, 16, 16);
  const Image base = testutil::synth_image(7, 16, 16, 1);
  for (int c = 0; c < 3; ++c)
    std::copy(base.v.begin(), base.v.end(), gray.plane(c));
  CHECK(color_divergence(gray) == 0.0);

  // pure red: R all ones, G and B all zeros -> disjoint one-hot histograms
  Image red(3, 8, 8, 0.0);
  std::fill(red.plane(0), red.plane(0) + 64, 1.0);
  CHECK(color_divergence(red) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  // spatial shuffling leaves histograms alone
  Image img = testutil::synth_image(8, 12, 12);
  const double before = color_divergence(img);
  Rng rng(9);
  for (int c = 0; c < 3; ++c) {
    double* p = img.plane(c);
    for (int i = 143; i > 0; --i)
      std::swap(p[i], p[rng.uniform_int(i + 1)]);
  }
  CHECK(color_divergence(img) == doctest::Approx(before).epsilon(1e-12));

  CHECK_THROWS_AS(color_divergence(Image(1, 8, 8, 0.5)), input_error);
}

TEST_CASE("baseline_gamma: identity at 1, brightens at 0.5, rejects g <= 0") {
  const Image img = testutil::synth_image(10, 16, 16);
  const Image same = baseline_gamma(img, 1.0);
  for (std::size_t i = 0; i < img.size(); ++i)
    CHECK(same.v[i] == doctest::Approx(img.v[i]).epsilon(1e-12));
  CHECK(mean(baseline_gamma(img, 0.5)) >= mean(img));
  CHECK_THROWS_AS(baseline_gamma(img, 0.0), input_error);
}

TEST_CASE("baseline_histeq: near-identity on a uniform-histogram ramp") {
  Image ramp(1, 16, 256);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 256; ++j) ramp.at(0, i, j) = j / 255.0;
  const Image eq = baseline_histeq(ramp);
  for (std::size_t i = 0; i < ramp.size(); ++i)
    CHECK(std::abs(eq.v[i] - ramp.v[i]) <= 1.0 / 255.0 + 1e-12);

  // constant image passes through untouched
  const Image flat(3, 8, 8, 0.3);
  const Image still = baseline_histeq(flat);
  CHECK(still.v == flat.v);
}

TEST_CASE("evaluate: self-comparison, aggregates, id mismatch") {
  testutil::TempDir tmp;
  namespace fs = std::filesystem;
  fs::create_directories(tmp.str("out"));
  fs::create_directories(tmp.str("ref"));
  for (int i = 0; i < 3; ++i) {
    const Image img = testutil::synth_image(20 + i, 24, 24);
    save_image(img, tmp.str("out/img" + std::to_string(i) + ".png"));
    save_image(img, tmp.str("ref/img" + std::to_string(i) + ".png"));
  }

  const MetricsReport rep = evaluate(tmp.str("out"), tmp.str("ref"), nullptr);
  REQUIRE(rep.rows.size() == 3);
  CHECK(std::isinf(rep.mean_psnr_db));
  CHECK(rep.mean_ssim == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(!rep.mean_niqe.has_value());

  double cd = 0.0;
  for (const auto& row : rep.rows) cd += row.color_divergence / 3.0;
  CHECK(rep.mean_color_divergence == doctest::Approx(cd).epsilon(1e-12));

  write_metrics_csv(rep, tmp.str("metrics.csv"));
  std::ifstream csv(tmp.str("metrics.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "id,psnr_db,ssim,color_divergence");

  save_image(testutil::synth_image(30, 24, 24), tmp.str("out/extra.png"));
  CHECK_THROWS_AS(evaluate(tmp.str("out"), tmp.str("ref"), nullptr),
                  input_error);
}

TEST_SUITE_END();
