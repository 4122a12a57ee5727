// Copyright 2026 The Orion Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "orion/errors.h"
#include "orion/rng.h"
#include "orion/value.h"
#include "test_util.h"

namespace orion {
namespace {

using testing::Param;
using testing::Tensor;

DType RandomDType(Rng& rng) { return static_cast<DType>(rng.Below(11)); }

Value RandomValue(Rng& rng, int depth) {
  const std::uint64_t pick = rng.Below(depth > 0 ? 7 : 6);
  switch (pick) {
    case 0:
      return Value::None();
    case 1: {
      TensorValue t;
      const std::uint64_t rank = rng.Below(5);
      for (std::uint64_t i = 0; i < rank; ++i) {
        // Mutated shapes carry negative and huge extents too.
        switch (rng.Below(4)) {
          case 0:
            t.shape.push_back(-(std::int64_t{1} << 31));
            break;
          case 1:
            t.shape.push_back(std::int64_t{1} << 62);
            break;
          default:
            t.shape.push_back(rng.Range(0, 9));
        }
      }
      t.dtype = RandomDType(rng);
      if (rng.Coin()) {
        t.fill = UniformFill{rng.Unit() - 1.0, rng.Unit() + 1.0, rng()};
      } else {
        const std::uint64_t k = rng.Below(4);
        if (k == 0) t.fill = ConstantFill{std::numeric_limits<double>::quiet_NaN()};
        if (k == 1) t.fill = ConstantFill{static_cast<std::int64_t>(rng())};
        if (k == 2) t.fill = ConstantFill{rng.Unit() * 1e300};
        if (k == 3) t.fill = ConstantFill{rng.Coin()};
      }
      return Value::Tensor(std::move(t));
    }
    case 2:
      return Value::Int(static_cast<std::int64_t>(rng()));
    case 3: {
      const std::uint64_t k = rng.Below(4);
      if (k == 0) return Value::Real(std::numeric_limits<double>::infinity());
      if (k == 1) return Value::Real(-0.0);
      return Value::Real((rng.Unit() - 0.5) * 1e10);
    }
    case 4:
      return Value::Bool(rng.Coin());
    case 5: {
      std::string s;
      const std::uint64_t n = rng.Below(6);
      for (std::uint64_t i = 0; i < n; ++i) s.push_back(static_cast<char>(rng.Below(256)));
      return Value::Str(std::move(s));
    }
    default: {
      Value::List list;
      const std::uint64_t n = rng.Below(4);
      for (std::uint64_t i = 0; i < n; ++i) list.push_back(RandomValue(rng, depth - 1));
      return Value::MakeList(std::move(list));
    }
  }
}

TEST(ValueTest, RankExamples) {
  EXPECT_EQ(Rank(Tensor({3, 3})), 2u);
  EXPECT_EQ(Rank(Tensor({})), 0u);
  EXPECT_EQ(Rank(Tensor({3, 3, 3})), 3u);
}

TEST(ValueTest, ElementCount) {
  EXPECT_EQ(Tensor({2, 3, 4}).element_count(), 24u);
  EXPECT_EQ(Tensor({}).element_count(), 1u);
  EXPECT_EQ(Tensor({5, 0, 7}).element_count(), 0u);
  EXPECT_EQ(Tensor({-2, 3}).element_count(), std::nullopt);
  EXPECT_EQ(Tensor({std::int64_t{1} << 40, std::int64_t{1} << 40}).element_count(),
            std::nullopt);
}

TEST(ValueTest, CornerScalarExamples) {
  const CornerConfig config;
  EXPECT_TRUE(ScalarEquals(CornerScalar(CornerKind::kZero, DType::kInt32, config),
                           Scalar{std::int64_t{0}}));
  const Scalar nan = CornerScalar(CornerKind::kNaN, DType::kFloat32, config);
  ASSERT_TRUE(std::holds_alternative<double>(nan));
  EXPECT_TRUE(std::isnan(std::get<double>(nan)));
  EXPECT_TRUE(ScalarEquals(CornerScalar(CornerKind::kLarge, DType::kInt64, config),
                           Scalar{std::int64_t{4611686018427387904}}));
  EXPECT_TRUE(ScalarEquals(CornerScalar(CornerKind::kNegative, DType::kInt32, config),
                           Scalar{std::int64_t{-2147483648}}));
  EXPECT_TRUE(ScalarEquals(CornerScalar(CornerKind::kLarge, DType::kFloat64, config),
                           Scalar{1e38}));
}

TEST(ValueTest, CornerScalarRejectsIllegalKinds) {
  const CornerConfig config;
  EXPECT_THROW(CornerScalar(CornerKind::kNaN, DType::kInt32, config), IllegalKindForType);
  EXPECT_THROW(CornerScalar(CornerKind::kNaN, DType::kBool, config), IllegalKindForType);
  EXPECT_THROW(CornerScalar(CornerKind::kNonAscii, DType::kFloat32, config),
               IllegalKindForType);
  EXPECT_NO_THROW(CornerScalar(CornerKind::kNaN, DType::kComplex64, config));
}

TEST(ValueTest, CornerConfigOverrides) {
  CornerConfig config = CornerConfig::FromJson({{"large_int", 12345}});
  EXPECT_TRUE(ScalarEquals(CornerScalar(CornerKind::kLarge, DType::kInt64, config),
                           Scalar{std::int64_t{12345}}));
  EXPECT_THROW(CornerConfig::FromJson({{"bogus", 1}}), ConfigError);
  EXPECT_EQ(CornerConfig::FromJson(CornerConfig().ToJson()).ToJson(), CornerConfig().ToJson());
}

TEST(ValueTest, DefaultNonAsciiIsRepeatedEmoji) {
  std::string expected;
  for (int i = 0; i < 8; ++i) expected += "\xF0\x9F\x98\x80";
  EXPECT_EQ(CornerConfig::DefaultNonAscii(), expected);
}

TEST(ValueTest, RoundtripExamples) {
  const ParamValue t = Param("x", 0, Value::Tensor(Tensor({2, 2}, 1.0)));
  EXPECT_EQ(ValidateRoundtrip(t), t);
  const ParamValue i = Param("n", 1, Value::Int(-2147483648));
  EXPECT_EQ(ValidateRoundtrip(i), i);
  const ParamValue l =
      Param("l", 2, Value::MakeList({Value::Str(""), Value::None()}));
  EXPECT_EQ(ValidateRoundtrip(l), l);
}

TEST(ValueTest, RoundtripKeepsCornerExtents) {
  const ParamValue p =
      Param("x", 0, Value::Tensor(Tensor({-(std::int64_t{1} << 31), std::int64_t{1} << 62})));
  EXPECT_EQ(ValidateRoundtrip(p), p);
}

TEST(ValueTest, RoundtripRandomTrees) {
  Rng rng(KeyBuilder(17).Add("roundtrip").key());
  for (int i = 0; i < 10000; ++i) {
    const ParamValue p = Param("p", i % 5, RandomValue(rng, 4));
    ASSERT_EQ(ValidateRoundtrip(p), p) << SerializeParam(p);
  }
}

TEST(ValueTest, TensorJsonLayout) {
  const Json j = ParamToJson(Param("x", 0, Value::Tensor(Tensor({2, 3}, 1.5))));
  EXPECT_EQ(j.at("name"), "x");
  EXPECT_EQ(j.at("pos"), 0);
  EXPECT_EQ(j.at("kind"), "tensor");
  EXPECT_EQ(j.at("shape"), Json::array({2, 3}));
  EXPECT_EQ(j.at("dtype"), "float32");
  EXPECT_TRUE(j.contains("fill"));
}

TEST(ValueTest, MalformedBytesThrow) {
  EXPECT_THROW(DeserializeParam("{not json"), SerializationError);
  EXPECT_THROW(DeserializeParam(R"({"name":"x","pos":0,"kind":"martian"})"),
               SerializationError);
  EXPECT_THROW(
      DeserializeParam(
          R"({"name":"x","pos":0,"kind":"tensor","fill":1,"shape":[2],"dtype":"float128"})"),
      SerializationError);
}

}  // namespace
}  // namespace orion
