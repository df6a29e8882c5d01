// Copyright 2026 The ftqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ftqa/tensor.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ftqa/error.h"

namespace ftqa::nn {
namespace {

std::vector<double> Values(const Tensor &t) { return {t.values().begin(), t.values().end()}; }
std::vector<double> Grad(const Tensor &t) { return {t.grad().begin(), t.grad().end()}; }

TEST(TensorTest, AffineWithIdentityIsIdentity) {
  const Tensor w = Tensor::FromValues({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  const Tensor x = Tensor::Vector({0.5, -2, 3});
  EXPECT_EQ(Values(Affine(w, x, Tensor::Zeros({3}))), Values(x));
}

TEST(TensorTest, ScalarActivations) {
  EXPECT_EQ(Sigmoid(Tensor::Scalar(0)).item(), 0.5);
  EXPECT_EQ(Values(Softmax(Tensor::Vector({3.7}))), std::vector<double>{1.0});
  const auto s = Values(Softmax(Tensor::Vector({1, 1, 1, 1})));
  for (double v : s) EXPECT_DOUBLE_EQ(v, 0.25);
  EXPECT_EQ(Values(Relu(Tensor::Vector({-1, 0, 2}))), (std::vector<double>{0, 0, 2}));
}

TEST(TensorTest, SumGradientIsOnes) {
  const Tensor x = Tensor::Vector({1, -2, 3});
  Tensor leaf = Tensor::FromValues({3}, Values(x), true);
  Backward(Sum(leaf));
  EXPECT_EQ(Grad(leaf), (std::vector<double>{1, 1, 1}));
}

TEST(TensorTest, DotSelfGradientIsTwiceInput) {
  Tensor x = Tensor::FromValues({3}, {1.5, -2, 0.25}, true);
  Backward(Dot(x, x));
  EXPECT_EQ(Grad(x), (std::vector<double>{3, -4, 0.5}));
}

TEST(TensorTest, GradientsAccumulateUntilZeroed) {
  Tensor x = Tensor::FromValues({2}, {1, 2}, true);
  Backward(Sum(x));
  Backward(Sum(x));
  EXPECT_EQ(Grad(x), (std::vector<double>{2, 2}));
  x.ZeroGrad();
  Backward(Sum(ScaleBy(x, 3)));
  EXPECT_EQ(Grad(x), (std::vector<double>{3, 3}));
}

TEST(TensorTest, NoGradGuardSkipsRecording) {
  Tensor x = Tensor::FromValues({2}, {1, 2}, true);
  Tensor y;
  {
    NoGradGuard guard;
    EXPECT_FALSE(GradEnabled());
    y = Sum(x);
  }
  EXPECT_TRUE(GradEnabled());
  EXPECT_FALSE(y.requires_grad());
}

TEST(TensorTest, ShapeErrors) {
  const Tensor w = Tensor::Zeros({2, 3});
  EXPECT_THROW(MatVec(w, Tensor::Zeros({2})), ShapeError);
  EXPECT_THROW(Add(Tensor::Zeros({2}), Tensor::Zeros({3})), ShapeError);
  EXPECT_THROW(Backward(Tensor::Zeros({2}, true)), ShapeError);
}

TEST(TensorTest, NonFiniteResultIsNumericError) {
  const double big = std::numeric_limits<double>::max();
  EXPECT_THROW(Add(Tensor::Vector({big}), Tensor::Vector({big})), NumericError);
}

TEST(TensorTest, BceWithLogitsValues) {
  EXPECT_NEAR(BceWithLogits(Tensor::Scalar(0), 1).item(), std::log(2.0), 1e-15);
  EXPECT_NEAR(BceWithLogits(Tensor::Scalar(40), 1).item(), 0.0, 1e-15);
  EXPECT_NEAR(BceWithLogits(Tensor::Scalar(-800), 0).item(), 0.0, 1e-15);
  EXPECT_NEAR(BceWithLogits(Tensor::Scalar(-800), 1).item(), 800.0, 1e-9);
}

TEST(TensorTest, AttentionPrimitives) {
  const std::vector<Tensor> states = {Tensor::Vector({1, 0}), Tensor::Vector({0, 2})};
  const Tensor logits = AttentionLogits(states, Tensor::Vector({3, 1}));
  EXPECT_EQ(Values(logits), (std::vector<double>{3, 2}));
  const Tensor pooled = WeightedSum(Tensor::Vector({0.25, 0.75}), states);
  EXPECT_EQ(Values(pooled), (std::vector<double>{0.25, 1.5}));
  const Tensor table = Tensor::FromValues({2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(Values(Row(table, 1)), (std::vector<double>{3, 4}));
  const std::vector<Tensor> parts = {Tensor::Vector({1}), Tensor::Vector({2, 3})};
  EXPECT_EQ(Values(Concat(parts)), (std::vector<double>{1, 2, 3}));
}

}  // namespace
}  // namespace ftqa::nn
