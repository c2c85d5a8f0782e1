#include <doctest.h>

#include <fstream>

#include "lowlight/dataset.hpp"
#include "lowlight/image_io.hpp"
#include "testutil.hpp"

using namespace lowlight;

TEST_SUITE_BEGIN("imageio");

TEST_CASE("solid mid-gray png loads as 128/255") {
  testutil::TempDir tmp;
  Image gray(3, 4, 4, 128.0 / 255.0);
  save_image(gray, tmp.str("gray.png"));
  const Image back = load_image(tmp.str("gray.png"));
  REQUIRE(back.c == 3);
  REQUIRE(back.h == 4);
  REQUIRE(back.w == 4);
  for (double v : back.v) CHECK(v == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
}

TEST_CASE("png roundtrip is idempotent at 8 bits") {
  testutil::TempDir tmp;
  const Image img = testutil::synth_image(7, 24, 31);
  save_image(img, tmp.str("a.png"));
  const Image once = load_image(tmp.str("a.png"));
  save_image(once, tmp.str("b.png"));
  const Image twice = load_image(tmp.str("b.png"));
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(once.v[i] == twice.v[i]);
  // every loaded value is exactly k/255
  for (double v : once.v) {
    const double k = v * 255.0;
    CHECK(k == doctest::Approx(std::round(k)).epsilon(1e-12));
  }
}

TEST_CASE("quantization: 0, 1 and 0.5 map to 0, 255 and 128") {
  testutil::TempDir tmp;
  Image img(1, 2, 2, 0.0);
  img.v = {0.0, 1.0, 0.5, 0.25};
  save_image(img, tmp.str("q.png"));
  const Image back = load_image(tmp.str("q.png"));
  CHECK(back.v[0] == 0.0);
  CHECK(back.v[1] == 1.0);
  CHECK(back.v[2] == doctest::Approx(128.0 / 255.0));
  CHECK(back.v[3] == doctest::Approx(64.0 / 255.0));
}

TEST_CASE("text file is rejected as unsupported format") {
  testutil::TempDir tmp;
  std::ofstream(tmp.str("fake.png")) << "this is not an image";
  CHECK_THROWS_AS(load_image(tmp.str("fake.png")), io_error);
}

TEST_CASE("missing file errors") {
  CHECK_THROWS_AS(load_image("/nonexistent/nope.png"), io_error);
}

TEST_CASE("jpeg roundtrip approximately preserves content") {
  testutil::TempDir tmp;
  const Image img = testutil::synth_image(9, 32, 32);
  save_image(img, tmp.str("a.jpg"));
  const Image back = load_image(tmp.str("a.jpg"));
  REQUIRE(back.c == 3);
  double err = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) err += std::abs(img.v[i] - back.v[i]);
  CHECK(err / img.size() < 0.05);
}

TEST_CASE("grayscale png loads as single channel") {
  testutil::TempDir tmp;
  save_image(testutil::synth_image(3, 10, 12, 1), tmp.str("g.png"));
  const Image back = load_image(tmp.str("g.png"));
  CHECK(back.c == 1);
}

TEST_CASE("random_crop_pair: determinism, alignment and edge cases") {
  const Image low = testutil::synth_image(1, 40, 50);
  Image high = low;
  for (double& v : high.v) v = std::min(1.0, v * 1.5);
  const PairedSample sample{low, high, "s"};

  const PairedSample a = random_crop_pair(sample, 16, 42);
  const PairedSample b = random_crop_pair(sample, 16, 42);
  REQUIRE(a.low.h == 16);
  REQUIRE(a.low.w == 16);
  CHECK(a.low.v == b.low.v);
  CHECK(a.high.v == b.high.v);

  // alignment: the same transform relates cropped low and high
  for (std::size_t i = 0; i < a.low.size(); ++i)
    CHECK(a.high.v[i] == doctest::Approx(std::min(1.0, a.low.v[i] * 1.5)));

  // size matching the short dimension pins that offset to zero
  const PairedSample full = random_crop_pair(sample, 40, 1);
  CHECK(full.low.h == 40);
  CHECK(full.low.w == 40);

  CHECK_THROWS_AS(random_crop_pair(sample, 51, 0), input_error);
}

TEST_CASE("identity crop is the only offset for exact-size square input") {
  const Image img = testutil::synth_image(2, 32, 32);
  const PairedSample sample{img, img, "s"};
  const PairedSample crop = random_crop_pair(sample, 32, 999);
  CHECK(crop.low.v == img.v);
}

TEST_CASE("scan_paired_dataset intersects stems and errors when empty") {
  testutil::TempDir tmp;
  namespace fs = std::filesystem;
  fs::create_directories(tmp.str("low"));
  fs::create_directories(tmp.str("high"));
  const Image img = testutil::synth_image(5, 8, 8);
  save_image(img, tmp.str("low/a.png"));
  save_image(img, tmp.str("low/b.png"));
  save_image(img, tmp.str("high/b.png"));
  save_image(img, tmp.str("high/c.png"));

  const auto pairs = scan_paired_dataset(tmp.str("low"), tmp.str("high"));
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].id == "b");

  fs::create_directories(tmp.str("empty"));
  CHECK_THROWS_AS(scan_paired_dataset(tmp.str("low"), tmp.str("empty")),
                  input_error);
}

TEST_CASE("scan order is lexicographic and complete for identical listings") {
  testutil::TempDir tmp;
  namespace fs = std::filesystem;
  fs::create_directories(tmp.str("low"));
  fs::create_directories(tmp.str("high"));
  const Image img = testutil::synth_image(5, 8, 8);
  for (const char* name : {"zeta.png", "alpha.png", "mid.png"}) {
    save_image(img, tmp.str("low/") + name);
    save_image(img, tmp.str("high/") + name);
  }
  const auto pairs = scan_paired_dataset(tmp.str("low"), tmp.str("high"));
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].id == "alpha");
  CHECK(pairs[1].id == "mid");
  CHECK(pairs[2].id == "zeta");
}

TEST_SUITE_END();
