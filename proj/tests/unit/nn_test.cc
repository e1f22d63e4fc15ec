// Copyright 2026 The vflsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "vflsim/nn/dense_net.h"
#include "vflsim/nn/matrix.h"

namespace vflsim {
namespace {

using ::testing::HasSubstr;

constexpr double kFdStep = 1e-5;
constexpr double kGradTol = 1e-4;

double RelErr(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

RealMatrix RandomMatrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RealMatrix m(rows, cols);
  for (double& v : m.values()) v = normal(rng);
  return m;
}

// Sum of the network outputs weighted by `probe`: a scalar whose gradient
// with respect to the outputs is exactly `probe`.
double ProbeLoss(const DenseNet& net, const RealMatrix& x, const RealMatrix& probe) {
  const RealMatrix out = Forward(net, x).output();
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out.values()[i] * probe.values()[i];
  return s;
}

double Central(const std::function<double()>& f, double& slot) {
  const double keep = slot;
  slot = keep + kFdStep;
  const double up = f();
  slot = keep - kFdStep;
  const double down = f();
  slot = keep;
  return (up - down) / (2 * kFdStep);
}

// Hand-rolled forward pass used as the oracle for Forward.
RealMatrix NaiveForward(const DenseNet& net, const RealMatrix& x) {
  RealMatrix cur = x;
  for (const DenseLayer& layer : net.layers()) {
    RealMatrix next(cur.rows(), layer.out_dim());
    for (std::size_t i = 0; i < cur.rows(); ++i) {
      for (std::size_t o = 0; o < layer.out_dim(); ++o) {
        double z = layer.bias[o];
        for (std::size_t k = 0; k < layer.in_dim(); ++k) {
          z += layer.weight(o, k) * cur(i, k);
        }
        next(i, o) = layer.activation == Activation::kRelu ? std::max(0.0, z) : z;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

TEST(RealMatrixTest, RowMajorLayoutAndSlices) {
  RealMatrix m = {{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_EQ(m.values()[3], 4.0);
  const RealMatrix slice = m.ColumnSlice(1, 3);
  EXPECT_EQ(slice, (RealMatrix{{2, 3}, {5, 6}}));
  const std::size_t ids[] = {1, 0, 1};
  EXPECT_EQ(m.GatherRows(ids), (RealMatrix{{4, 5, 6}, {1, 2, 3}, {4, 5, 6}}));
}

TEST(RealMatrixTest, ConcatAndSetColumnsRoundTrip) {
  const RealMatrix a = {{1, 2}, {3, 4}};
  const RealMatrix b = {{5}, {6}};
  const RealMatrix blocks[] = {a, b};
  RealMatrix joined = ConcatColumns(blocks);
  EXPECT_EQ(joined, (RealMatrix{{1, 2, 5}, {3, 4, 6}}));
  EXPECT_EQ(joined.ColumnSlice(0, 2), a);
  joined.SetColumns(2, RealMatrix{{7}, {8}});
  EXPECT_EQ(joined(1, 2), 8.0);
}

TEST(RealMatrixTest, RejectsRaggedInput) {
  EXPECT_THROW((RealMatrix{{1, 2}, {3}}), std::invalid_argument);
  EXPECT_THROW(RealMatrix(2, 2, std::vector<double>{1, 2, 3}), std::invalid_argument);
  const RealMatrix blocks[] = {RealMatrix(2, 1), RealMatrix(3, 1)};
  EXPECT_THROW(ConcatColumns(blocks), std::invalid_argument);
}

TEST(RealMatrixTest, FiniteCheck) {
  RealMatrix m(1, 2);
  EXPECT_TRUE(m.AllFinite());
  m(0, 1) = std::nan("");
  EXPECT_FALSE(m.AllFinite());
}

TEST(DenseNetTest, IdentityLayer) {
  DenseNet net({DenseLayer{{{1, 0}, {0, 1}}, {0, 0}, Activation::kIdentity}});
  EXPECT_EQ(Forward(net, RealMatrix{{3, 4}}).output(), (RealMatrix{{3, 4}}));
}

TEST(DenseNetTest, ReluClampsNegativePreActivation) {
  DenseNet net({DenseLayer{{{2}}, {1}, Activation::kRelu}});
  EXPECT_EQ(Forward(net, RealMatrix{{-3}}).output()(0, 0), 0.0);
}

TEST(DenseNetTest, ForwardMatchesNaiveOracle) {
  std::mt19937_64 rng(11);
  const std::size_t dims[] = {5, 7, 3};
  const DenseNet net = DenseNet::Glorot(dims, rng);
  const RealMatrix x = RandomMatrix(9, 5, rng);
  const RealMatrix got = Forward(net, x).output();
  const RealMatrix want = NaiveForward(net, x);
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got.values()[i], want.values()[i], 1e-12);
  }
}

TEST(DenseNetTest, ForwardRejectsWidthMismatch) {
  std::mt19937_64 rng(1);
  const std::size_t dims[] = {4, 2};
  const DenseNet net = DenseNet::Glorot(dims, rng);
  try {
    Forward(net, RealMatrix(1, 3));
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_THAT(e.what(), HasSubstr("1x3"));
  }
}

TEST(DenseNetTest, ConstructorRejectsBrokenChain) {
  DenseLayer a{RealMatrix(3, 2), {0, 0, 0}, Activation::kRelu};
  DenseLayer b{RealMatrix(1, 4), {0}, Activation::kIdentity};
  EXPECT_THROW(DenseNet({a, b}), std::invalid_argument);
}

TEST(DenseNetTest, GlorotShapesAndBounds) {
  std::mt19937_64 rng(3);
  const std::size_t dims[] = {6, 10, 4};
  const DenseNet net = DenseNet::Glorot(dims, rng);
  ASSERT_EQ(net.num_layers(), 2u);
  EXPECT_EQ(net.input_dim(), 6u);
  EXPECT_EQ(net.output_dim(), 4u);
  EXPECT_EQ(net.layers()[0].activation, Activation::kRelu);
  EXPECT_EQ(net.layers()[1].activation, Activation::kIdentity);
  const double limit = std::sqrt(6.0 / 16.0);
  for (double w : net.layers()[0].weight.values()) EXPECT_LE(std::abs(w), limit);
  for (double b : net.layers()[0].bias) EXPECT_EQ(b, 0.0);
  EXPECT_EQ(net.num_parameters(), 6u * 10 + 10 + 10u * 4 + 4);
}

TEST(DenseNetTest, GlorotIsDeterministic) {
  const std::size_t dims[] = {3, 5, 2};
  std::mt19937_64 a(9), b(9);
  EXPECT_EQ(DenseNet::Glorot(dims, a), DenseNet::Glorot(dims, b));
}

TEST(BackwardTest, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(4);
  const std::size_t dims[] = {3, 4, 2};
  const DenseNet net = DenseNet::Glorot(dims, rng);
  const RealMatrix x = RandomMatrix(5, 3, rng);
  const BackwardResult back = Backward(net, Forward(net, x), RealMatrix(5, 2));
  for (const LayerGrad& g : back.param_grads) {
    for (double v : g.weight.values()) EXPECT_EQ(v, 0.0);
    for (double v : g.bias) EXPECT_EQ(v, 0.0);
  }
  for (double v : back.input_grad.values()) EXPECT_EQ(v, 0.0);
}

TEST(BackwardTest, IdentityLayerPassesGradientThrough) {
  DenseNet net({DenseLayer{{{1, 0}, {0, 1}}, {0, 0}, Activation::kIdentity}});
  const RealMatrix x = {{0.3, -2}};
  const RealMatrix up = {{0.25, -1.5}};
  EXPECT_EQ(Backward(net, Forward(net, x), up).input_grad, up);
}

TEST(BackwardTest, RejectsUpstreamShapeMismatch) {
  std::mt19937_64 rng(4);
  const std::size_t dims[] = {3, 2};
  const DenseNet net = DenseNet::Glorot(dims, rng);
  const Activations acts = Forward(net, RealMatrix(2, 3));
  EXPECT_THROW(Backward(net, acts, RealMatrix(2, 3)), std::invalid_argument);
}

// Every parameter and input gradient against central differences, for nets
// of 1 to 4 layers and widths up to 16.
class GradientSuite : public ::testing::TestWithParam<int> {};

TEST_P(GradientSuite, MatchesCentralDifferences) {
  const int seed = GetParam();
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::uniform_int_distribution<std::size_t> width(2, 16);
  for (std::size_t depth = 1; depth <= 4; ++depth) {
    std::vector<std::size_t> dims;
    for (std::size_t l = 0; l <= depth; ++l) dims.push_back(width(rng));
    DenseNet net = DenseNet::Glorot(dims, rng);
    std::normal_distribution<double> normal(0.0, 0.1);
    for (DenseLayer& layer : net.mutable_layers()) {
      for (double& b : layer.bias) b = normal(rng);
    }
    RealMatrix x = RandomMatrix(3, dims.front(), rng);
    const RealMatrix probe = RandomMatrix(3, dims.back(), rng);
    const BackwardResult back = Backward(net, Forward(net, x), probe);
    const auto loss = [&] { return ProbeLoss(net, x, probe); };

    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      DenseLayer& layer = net.mutable_layers()[l];
      for (std::size_t k = 0; k < layer.weight.size(); ++k) {
        const double fd = Central(loss, layer.weight.values()[k]);
        EXPECT_LT(RelErr(back.param_grads[l].weight.values()[k], fd), kGradTol)
            << "depth " << depth << " layer " << l << " weight " << k;
      }
      for (std::size_t k = 0; k < layer.bias.size(); ++k) {
        const double fd = Central(loss, layer.bias[k]);
        EXPECT_LT(RelErr(back.param_grads[l].bias[k], fd), kGradTol)
            << "depth " << depth << " layer " << l << " bias " << k;
      }
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double fd = Central(loss, x.values()[k]);
      EXPECT_LT(RelErr(back.input_grad.values()[k], fd), kGradTol)
          << "depth " << depth << " input " << k;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(FiveSeeds, GradientSuite, ::testing::Range(0, 5));

TEST(CrossEntropyTest, UniformLogitsGiveLogC) {
  const RealMatrix logits(3, 5, 0.7);
  const int labels[] = {0, 4, 2};
  EXPECT_NEAR(CrossEntropyWithGrad(logits, labels).loss, std::log(5.0), 1e-12);
}

TEST(CrossEntropyTest, ConfidentSample) {
  const int labels[] = {0};
  const LossAndGrad lg = CrossEntropyWithGrad(RealMatrix{{10, -10}}, labels);
  const double tail = 1.0 / (1.0 + std::exp(20.0));  // softmax mass on class 1
  EXPECT_NEAR(lg.loss, -std::log1p(-tail), 1e-15);
  EXPECT_NEAR(lg.loss, 2.06e-9, 0.01e-9);
  EXPECT_NEAR(lg.grad(0, 0), -tail, 1e-15);
  EXPECT_NEAR(lg.grad(0, 1), tail, 1e-15);
}

TEST(CrossEntropyTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  RealMatrix logits = RandomMatrix(4, 3, rng);
  const int labels[] = {2, 0, 1, 1};
  const LossAndGrad lg = CrossEntropyWithGrad(logits, labels);
  const auto loss = [&] { return CrossEntropyWithGrad(logits, labels).loss; };
  for (std::size_t k = 0; k < logits.size(); ++k) {
    EXPECT_LT(RelErr(lg.grad.values()[k], Central(loss, logits.values()[k])), kGradTol);
  }
}

TEST(CrossEntropyTest, RejectsLabelOutOfRange) {
  const int labels[] = {3};
  EXPECT_THROW(CrossEntropyWithGrad(RealMatrix(1, 3), labels), std::invalid_argument);
  const int negative[] = {-1};
  EXPECT_THROW(CrossEntropyWithGrad(RealMatrix(1, 3), negative), std::invalid_argument);
}

TEST(SoftmaxTest, RowsSumToOne) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    RealMatrix logits = RandomMatrix(6, 7, rng);
    for (double& v : logits.values()) v *= 30.0;
    const RealMatrix p = Softmax(logits);
    for (std::size_t i = 0; i < p.rows(); ++i) {
      double s = 0.0;
      for (double v : p.row(i)) s += v;
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(SgdTest, SingleStepArithmetic) {
  DenseNet net({DenseLayer{{{1}}, {0}, Activation::kIdentity}});
  const ParamGrads g = {LayerGrad{{{0.25}}, {0}}};
  EXPECT_EQ(SgdStep(net, g, 1.0).layers()[0].weight(0, 0), 0.75);
}

TEST(SgdTest, RejectsNonPositiveRate) {
  DenseNet net({DenseLayer{{{1}}, {0}, Activation::kIdentity}});
  const ParamGrads g = {LayerGrad{{{0.25}}, {0}}};
  EXPECT_THROW(SgdStep(net, g, 0.0), std::invalid_argument);
  EXPECT_THROW(SgdStep(net, g, -1.0), std::invalid_argument);
}

TEST(SgdTest, ZeroGradientLeavesParametersBitwise) {
  std::mt19937_64 rng(8);
  const std::size_t dims[] = {3, 4, 2};
  const DenseNet net = DenseNet::Glorot(dims, rng);
  ParamGrads zero;
  for (const DenseLayer& l : net.layers()) {
    zero.push_back({RealMatrix(l.out_dim(), l.in_dim()),
                    std::vector<double>(l.out_dim())});
  }
  EXPECT_EQ(SgdStep(net, zero, 0.3), net);
}

TEST(SgdTest, TwoStepsEqualOneSummedStep) {
  DenseNet net({DenseLayer{{{1, -2}}, {0.5}, Activation::kIdentity}});
  const ParamGrads g = {LayerGrad{{{0.5, 0.25}}, {1.0}}};
  const ParamGrads twice = {LayerGrad{{{1.0, 0.5}}, {2.0}}};
  // Dyadic values keep both paths exact.
  EXPECT_EQ(SgdStep(SgdStep(net, g, 0.5), g, 0.5), SgdStep(net, twice, 0.5));
}

TEST(ArgmaxTest, TiesGoToLowestIndex) {
  EXPECT_EQ(ArgmaxRows(RealMatrix{{1, 3, 3}, {2, 2, 2}, {0, 0, 1}}),
            (std::vector<int>{1, 0, 2}));
}

TEST(SaliencyTest, ZeroFirstLayerGivesZeroMap) {
  DenseNet net({DenseLayer{RealMatrix(3, 4), {0.1, -0.2, 0.3}, Activation::kRelu},
                DenseLayer{{{1, 2, 3}, {-1, 0, 1}}, {0, 0}, Activation::kIdentity}});
  const double x[] = {1, -2, 3, 4};
  const SaliencyMap map = InputSaliency(net, x, 1);
  ASSERT_EQ(map.values.size(), 4u);
  for (double v : map.values) EXPECT_EQ(v, 0.0);
}

TEST(SaliencyTest, MatchesFiniteDifferenceSlopes) {
  std::mt19937_64 rng(13);
  const std::size_t dims[] = {6, 8, 3};
  const DenseNet net = DenseNet::Glorot(dims, rng);
  std::vector<double> x(6);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : x) v = normal(rng);
  const SaliencyMap map = InputSaliency(net, x, 2);
  const int labels[] = {2};
  RealMatrix row(1, 6, x);
  const auto loss = [&] {
    return CrossEntropyWithGrad(Forward(net, row).output(), labels).loss;
  };
  for (std::size_t k = 0; k < x.size(); ++k) {
    EXPECT_GE(map.values[k], 0.0);
    EXPECT_LT(RelErr(map.values[k], std::abs(Central(loss, row.values()[k]))), kGradTol);
  }
}

TEST(SaliencyTest, ScalingAColumnRaisesItsSaliency) {
  // Single softmax layer: d CE / d x_j = sum_o (p_o - y_o) W_oj. Doubling
  // column j while keeping the logits fixed (x_j = 0) doubles that entry.
  DenseNet net({DenseLayer{{{0.5, -1.0, 0.2}, {-0.3, 0.4, 0.9}}, {0, 0},
                           Activation::kIdentity}});
  const double x[] = {0.7, 0.0, -0.4};
  const double before = InputSaliency(net, x, 0).values[1];
  ASSERT_GT(before, 0.0);
  for (std::size_t o = 0; o < 2; ++o) net.mutable_layers()[0].weight(o, 1) *= 2;
  EXPECT_GT(InputSaliency(net, x, 0).values[1], before);
}

TEST(SaliencyTest, RejectsWrongWidth) {
  DenseNet net({DenseLayer{{{1, 0}}, {0}, Activation::kIdentity}});
  const double x[] = {1.0};
  EXPECT_THROW(InputSaliency(net, x, 0), std::invalid_argument);
}

TEST(ComposeTest, ComposedForwardEqualsChainedForward) {
  std::mt19937_64 rng(17);
  const std::size_t a_dims[] = {4, 6, 3};
  const std::size_t b_dims[] = {3, 5, 2};
  const DenseNet a = DenseNet::Glorot(a_dims, rng);
  const DenseNet b = DenseNet::Glorot(b_dims, rng);
  const RealMatrix x = RandomMatrix(5, 4, rng);
  EXPECT_EQ(Forward(DenseNet::Compose(a, b), x).output(),
            Forward(b, Forward(a, x).output()).output());
}

}  // namespace
}  // namespace vflsim
