#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lowlight/model.hpp"
#include "lowlight/nn_ops.hpp"
#include "testutil.hpp"

using namespace lowlight;
using nn::ConvSpec;

TEST_SUITE_BEGIN("model");

namespace {

double dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.v[i] * b.v[i];
  return s;
}

}  // namespace

TEST_CASE("conv_backward_input is the exact adjoint of conv_forward") {
  const ConvSpec spec{3, 5, 3, 2, 1};
  const auto w = testutil::random_tensor(1, 1, 1, 5 * 3 * 3 * 3, -0.5, 0.5).v;
  const Tensor x = testutil::random_tensor(2, 3, 9, 7, -1.0, 1.0);
  const Tensor y = nn::conv_forward(x, spec, w.data(), nullptr);
  const Tensor u = testutil::random_tensor(3, y.c, y.h, y.w, -1.0, 1.0);
  const Tensor xt = nn::conv_backward_input(u, spec, w.data(), x.h, x.w);
  // <C x, u> == <x, C^T u>
  CHECK(dot(y, u) == doctest::Approx(dot(x, xt)).epsilon(1e-12));
}

TEST_CASE("conv_backward_params matches finite differences") {
  const ConvSpec spec{2, 4, 3, 1, 1};
  auto w = testutil::random_tensor(4, 1, 1, 4 * 2 * 3 * 3, -0.5, 0.5).v;
  std::vector<double> b(4, 0.1);
  const Tensor x = testutil::random_tensor(5, 2, 6, 5, -1.0, 1.0);
  const Tensor dy = testutil::random_tensor(6, 4, 6, 5, -1.0, 1.0);

  std::vector<double> dw(w.size(), 0.0), db(b.size(), 0.0);
  nn::conv_backward_params(x, dy, spec, dw.data(), db.data());

  // loss = <conv(x), dy> is linear in w, so central differences are exact
  const double h = 1e-4;
  for (std::size_t i : {std::size_t{0}, w.size() / 2, w.size() - 1}) {
    auto wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    const double lp = dot(nn::conv_forward(x, spec, wp.data(), b.data()), dy);
    const double lm = dot(nn::conv_forward(x, spec, wm.data(), b.data()), dy);
    CHECK(dw[i] == doctest::Approx((lp - lm) / (2 * h)).epsilon(1e-7));
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto bp = b, bm = b;
    bp[i] += h;
    bm[i] -= h;
    const double lp = dot(nn::conv_forward(x, spec, w.data(), bp.data()), dy);
    const double lm = dot(nn::conv_forward(x, spec, w.data(), bm.data()), dy);
    CHECK(db[i] == doctest::Approx((lp - lm) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("deconv doubles spatial size and is adjoint-consistent") {
  const ConvSpec adj{6, 10, 3, 2, 1};  // high side 6ch, low side 10ch
  const auto w = testutil::random_tensor(7, 1, 1, 10 * 6 * 3 * 3, -0.3, 0.3).v;
  for (int n : {1, 2, 5}) {
    const Tensor x = testutil::random_tensor(8 + n, 10, n, n, -1.0, 1.0);
    const Tensor y = nn::deconv_forward(x, adj, w.data(), nullptr);
    CHECK(y.c == 6);
    CHECK(y.h == 2 * n);
    CHECK(y.w == 2 * n);
    // <deconv(x), u> == <x, conv(u)>
    const Tensor u = testutil::random_tensor(50 + n, 6, 2 * n, 2 * n, -1.0, 1.0);
    const Tensor back = nn::deconv_backward_input(u, adj, w.data());
    CHECK(dot(y, u) == doctest::Approx(dot(x, back)).epsilon(1e-12));
  }
}

TEST_CASE("deconv_backward_params matches finite differences") {
  const ConvSpec adj{4, 8, 3, 2, 1};
  auto w = testutil::random_tensor(9, 1, 1, 8 * 4 * 3 * 3, -0.3, 0.3).v;
  std::vector<double> b(4, 0.0);
  const Tensor x = testutil::random_tensor(10, 8, 3, 3, -1.0, 1.0);
  const Tensor dy = testutil::random_tensor(11, 4, 6, 6, -1.0, 1.0);

  std::vector<double> dw(w.size(), 0.0), db(b.size(), 0.0);
  nn::deconv_backward_params(dy, x, adj, dw.data(), db.data());

  const double h = 1e-4;
  for (std::size_t i : {std::size_t{0}, w.size() / 3, w.size() - 1}) {
    auto wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    const double lp = dot(nn::deconv_forward(x, adj, wp.data(), b.data()), dy);
    const double lm = dot(nn::deconv_forward(x, adj, wm.data(), b.data()), dy);
    CHECK(dw[i] == doctest::Approx((lp - lm) / (2 * h)).epsilon(1e-7));
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto bp = b, bm = b;
    bp[i] += h;
    bm[i] -= h;
    const double lp = dot(nn::deconv_forward(x, adj, w.data(), bp.data()), dy);
    const double lm = dot(nn::deconv_forward(x, adj, w.data(), bm.data()), dy);
    CHECK(db[i] == doctest::Approx((lp - lm) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("init_model is seed-deterministic") {
  const ModelParams a = init_model(123, 16);
  const ModelParams b = init_model(123, 16);
  const ModelParams c = init_model(124, 16);
  REQUIRE(a.arrays().size() == b.arrays().size());
  bool all_equal = true, any_diff_c = false;
  for (std::size_t i = 0; i < a.arrays().size(); ++i) {
    if (a.arrays()[i].data != b.arrays()[i].data) all_equal = false;
    if (a.arrays()[i].data != c.arrays()[i].data) any_diff_c = true;
  }
  CHECK(all_equal);
  CHECK(any_diff_c);
}

TEST_CASE("first layer maps 3 input channels to width outputs with 3x3 kernels") {
  const ModelParams p = init_model(1, 64);
  const auto& stem = p.arrays()[0];
  CHECK(stem.name == "stem.w");
  CHECK(stem.shape == std::vector<int>{64, 3, 3, 3});
}

TEST_CASE("count_params: monotone in width, seed-independent, exact for width 8") {
  CHECK(count_params(init_model(0, 64)) > count_params(init_model(0, 32)));
  CHECK(count_params(init_model(5, 32)) == count_params(init_model(99, 32)));

  // independent enumeration of the width-8 architecture
  const int w = 8;
  std::int64_t expect = 0;
  auto conv = [&](int cin, int cout, int k) { expect += cout * cin * k * k + cout; };
  conv(3, w, 3);                         // stem
  conv(w, 2 * w, 3);                     // enc1
  conv(2 * w, 4 * w, 3);                 // enc2
  conv(4 * w, 8 * w, 3);                 // enc3
  expect += (8 * w) * (4 * w) * 9 + 4 * w;  // up3 (kernel + high-res bias)
  conv(8 * w, 4 * w, 3);                 // fuse3
  expect += (4 * w) * (2 * w) * 9 + 2 * w;  // up2
  conv(4 * w, 2 * w, 3);                 // fuse2
  expect += (2 * w) * w * 9 + w;            // up1
  conv(2 * w, w, 3);                     // fuse1
  conv(w, 1, 1);                         // head_l
  conv(w, 3, 1);                         // head_r
  conv(w, 3, 1);                         // head_n
  CHECK(count_params(init_model(0, 8)) == expect);
  CHECK(expect == 73087);
}

TEST_CASE("forward: shape contract and activation ranges") {
  const ModelParams p = init_model(42, 8);
  for (int size : {16, 24, 32}) {
    const Tensor y = testutil::random_tensor(size, 3, size, size, 0.0, 1.0);
    const DecompositionTriple t = forward_one(p, y);
    CHECK(t.L.c == 1);
    CHECK(t.R.c == 3);
    CHECK(t.N.c == 3);
    CHECK(t.L.h == size);
    CHECK(t.R.h == size);
    CHECK(t.N.w == size);
    for (double v : t.L.v) CHECK((v >= 0.0 && v <= 1.0));
    for (double v : t.R.v) CHECK((v >= 0.0 && v <= 1.0));
    for (double v : t.N.v) CHECK((v >= -1.0 && v <= 1.0));
  }
}

TEST_CASE("forward rejects bad inputs") {
  const ModelParams p = init_model(0, 8);
  CHECK_THROWS_AS(forward_one(p, Tensor(1, 16, 16, 0.5)), input_error);
  CHECK_THROWS_AS(forward_one(p, Tensor(3, 12, 16, 0.5)), input_error);
}

TEST_CASE("zero-initialized heads emit the activation-at-zero constants") {
  ModelParams p = init_model(3, 8);
  for (std::size_t i = 2 * 10; i < p.arrays().size(); ++i)  // the three heads
    std::fill(p.arrays()[i].data.begin(), p.arrays()[i].data.end(), 0.0);
  const Tensor y = testutil::random_tensor(1, 3, 16, 16, 0.0, 1.0);
  const DecompositionTriple t = forward_one(p, y);
  for (double v : t.L.v) CHECK(v == 0.5);
  for (double v : t.R.v) CHECK(v == 0.5);
  for (double v : t.N.v) CHECK(v == 0.0);
}

TEST_CASE("batched forward equals per-item forward") {
  const ModelParams p = init_model(7, 8);
  std::vector<Tensor> batch;
  for (int i = 0; i < 5; ++i)
    batch.push_back(testutil::random_tensor(100 + i, 3, 16, 16, 0.0, 1.0));
  const auto joint = forward(p, batch, 4);
  for (int i = 0; i < 5; ++i) {
    const auto solo = forward_one(p, batch[i]);
    CHECK(joint[i].L.v == solo.L.v);
    CHECK(joint[i].R.v == solo.R.v);
    CHECK(joint[i].N.v == solo.N.v);
  }
}

TEST_CASE("params_from_arrays validates shapes") {
  const ModelParams p = init_model(1, 8);
  auto arrays = p.arrays();
  CHECK_NOTHROW(params_from_arrays(8, 1, arrays));
  CHECK_THROWS_AS(params_from_arrays(16, 1, arrays), input_error);
  arrays[0].shape = {8, 3, 5, 5};
  CHECK_THROWS_AS(params_from_arrays(8, 1, arrays), input_error);
}

TEST_SUITE_END();
