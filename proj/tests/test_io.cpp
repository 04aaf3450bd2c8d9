// Copyright 2026 The MSTM Authors.
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

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <vector>

#include <doctest.h>

#include "mstm/error.hpp"
#include "mstm/io.hpp"
#include "test_util.hpp"

using namespace mstm;

namespace {

void write_raw(const std::string& path, const std::vector<unsigned char>& b) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(b.data()),
            static_cast<std::streamsize>(b.size()));
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("fvecs twelve byte example") {
  testutil::TempDir tmp;
  std::string path = tmp.file("one.fvecs");
  // dim=2 | 1.0f | 2.0f, little endian.
  std::vector<unsigned char> bytes{0x02, 0x00, 0x00, 0x00, 0x00, 0x00,
                                   0x80, 0x3F, 0x00, 0x00, 0x00, 0x40};
  write_raw(path, bytes);
  auto vecs = read_fvecs(path);
  REQUIRE(vecs.size() == 1);
  REQUIRE(vecs[0].size() == 2);
  CHECK(vecs[0][0] == 1.0f);
  CHECK(vecs[0][1] == 2.0f);

  std::string out = tmp.file("two.fvecs");
  write_fvecs(out, {{1.0f, 2.0f}});
  CHECK(testutil::read_bytes(out) == bytes);
}

TEST_CASE("fvecs round trip is byte identical") {
  testutil::TempDir tmp;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(-4.0f, 4.0f);
  std::vector<std::vector<float>> vecs(37, std::vector<float>(9));
  for (auto& v : vecs)
    for (auto& x : v) x = u(rng);

  std::string a = tmp.file("a.fvecs");
  std::string b = tmp.file("b.fvecs");
  write_fvecs(a, vecs);
  auto back = read_fvecs(a);
  CHECK(back == vecs);
  write_fvecs(b, back);
  CHECK(testutil::read_bytes(a) == testutil::read_bytes(b));
}

TEST_CASE("ivecs round trip") {
  testutil::TempDir tmp;
  std::vector<std::vector<std::int32_t>> rows{{1, 2, 3}, {7, -1, 0}};
  std::string path = tmp.file("r.ivecs");
  write_ivecs(path, rows);
  CHECK(read_ivecs(path) == rows);
}

TEST_CASE("empty file yields zero vectors") {
  testutil::TempDir tmp;
  std::string path = tmp.file("empty.fvecs");
  write_raw(path, {});
  CHECK(read_fvecs(path).empty());
}

TEST_CASE("malformed files are rejected with format errors") {
  testutil::TempDir tmp;

  // Truncated record: header says dim 2, only one value follows.
  std::string trunc = tmp.file("trunc.fvecs");
  write_raw(trunc, {0x02, 0x00, 0x00, 0x00, 0x00, 0x00, 0x80, 0x3F});
  CHECK_THROWS_AS(read_fvecs(trunc), FormatError);

  // Non-positive dimension.
  std::string zdim = tmp.file("zdim.fvecs");
  write_raw(zdim, {0x00, 0x00, 0x00, 0x00});
  CHECK_THROWS_AS(read_fvecs(zdim), FormatError);

  // Dimension changes between records.
  std::string mixed = tmp.file("mixed.fvecs");
  std::vector<unsigned char> bytes{
      0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x80, 0x3F,         // dim 1
      0x02, 0x00, 0x00, 0x00, 0x00, 0x00, 0x80, 0x3F, 0x00,
      0x00, 0x00, 0x40};                                      // dim 2
  write_raw(mixed, bytes);
  CHECK_THROWS_AS(read_fvecs(mixed), FormatError);

  CHECK_THROWS_AS(read_fvecs(tmp.file("missing.fvecs")), FormatError);
}

TEST_CASE("manifest round trip") {
  testutil::TempDir tmp;
  DatasetManifest m;
  m.name = "toy";
  m.count = 5;
  m.modalities = {{"m0.fvecs", 4, false}, {"m1.fvecs", 3, true}};
  m.query_files = {"q0.fvecs", ""};
  m.truth_file = "truth.ivecs";
  m.sources_file = "src.ivecs";
  std::string path = tmp.file("toy.json");
  write_manifest(path, m);
  DatasetManifest back = read_manifest(path);
  CHECK(back.name == m.name);
  CHECK(back.count == m.count);
  REQUIRE(back.modalities.size() == 2);
  CHECK(back.modalities[0].file == "m0.fvecs");
  CHECK(back.modalities[1].dim == 3);
  CHECK(back.modalities[1].normalize);
  CHECK(back.query_files == m.query_files);
  CHECK(back.truth_file == m.truth_file);
  CHECK(back.sources_file == m.sources_file);
  CHECK(back.dir == tmp.path);
}

TEST_CASE("load_dataset stitches aligned modalities") {
  testutil::TempDir tmp;
  std::mt19937_64 rng(9);
  std::vector<std::vector<float>> m0, m1;
  for (int i = 0; i < 10; ++i) {
    m0.push_back(testutil::random_unit_vec(rng, 4));
    m1.push_back(testutil::random_unit_vec(rng, 3));
  }
  write_fvecs(tmp.file("m0.fvecs"), m0);
  write_fvecs(tmp.file("m1.fvecs"), m1);
  DatasetManifest m;
  m.name = "toy";
  m.count = 10;
  m.modalities = {{"m0.fvecs", 4, false}, {"m1.fvecs", 3, false}};
  m.dir = tmp.path;
  auto data = load_dataset(m);
  CHECK(data.size() == 10);
  CHECK(data.modalities() == 2);
  auto v = data.vec(1, 7);
  CHECK(std::vector<float>(v.begin(), v.end()) == m1[7]);

  // Mismatched counts are an error.
  m1.pop_back();
  write_fvecs(tmp.file("m1.fvecs"), m1);
  CHECK_THROWS_AS(load_dataset(m), FormatError);
}

TEST_CASE("load_dataset normalizes when flagged") {
  testutil::TempDir tmp;
  write_fvecs(tmp.file("m0.fvecs"), {{3.0f, 4.0f}, {0.5f, 0.0f}});
  DatasetManifest m;
  m.name = "toy";
  m.count = 2;
  m.modalities = {{"m0.fvecs", 2, true}};
  m.dir = tmp.path;
  auto data = load_dataset(m);
  for (std::size_t id = 0; id < 2; ++id) {
    auto v = data.vec(0, id);
    double norm = 0.0;
    for (float x : v) norm += static_cast<double>(x) * x;
    CHECK(std::abs(norm - 1.0) < 1e-4);
  }
  CHECK(data.vec(0, 0)[0] == doctest::Approx(0.6).epsilon(1e-6));

  // Zero-norm vector cannot be normalized.
  write_fvecs(tmp.file("m0.fvecs"), {{0.0f, 0.0f}, {1.0f, 0.0f}});
  CHECK_THROWS_AS(load_dataset(m), FormatError);
}

TEST_CASE("loader rejects non-finite components") {
  testutil::TempDir tmp;
  write_fvecs(tmp.file("m0.fvecs"),
              {{1.0f, std::numeric_limits<float>::quiet_NaN()}});
  DatasetManifest m;
  m.name = "toy";
  m.count = 1;
  m.modalities = {{"m0.fvecs", 2, false}};
  m.dir = tmp.path;
  CHECK_THROWS_AS(load_dataset(m), FormatError);

  write_fvecs(tmp.file("m0.fvecs"),
              {{1.0f, std::numeric_limits<float>::infinity()}});
  CHECK_THROWS_AS(load_dataset(m), FormatError);
}

TEST_CASE("weights file stores squared values") {
  testutil::TempDir tmp;
  std::string path = tmp.file("w.json");
  WeightVector w = WeightVector::from_squared({0.1199f, 0.5572f});
  write_weights(path, w);
  WeightVector back = read_weights(path, 2);
  CHECK(back.squared(0) == doctest::Approx(0.1199).epsilon(1e-6));
  CHECK(back.squared(1) == doctest::Approx(0.5572).epsilon(1e-6));

  // Missing indexes default to zero weight; out-of-range keys are errors.
  WeightVector padded = read_weights(path, 3);
  CHECK(padded.squared(2) == 0.0);
  CHECK_THROWS_AS(read_weights(path, 1), FormatError);

  std::ofstream bad(tmp.file("bad.json"));
  bad << "{\"0\": -1.0, \"1\": 0.5}";
  bad.close();
  CHECK_THROWS(read_weights(tmp.file("bad.json"), 2));

  std::ofstream junk(tmp.file("junk.json"));
  junk << "not json";
  junk.close();
  CHECK_THROWS_AS(read_weights(tmp.file("junk.json"), 2), FormatError);
}

TEST_CASE("queries load per modality with absent files") {
  testutil::TempDir tmp;
  std::mt19937_64 rng(13);
  std::vector<std::vector<float>> m0, q0;
  for (int i = 0; i < 6; ++i) m0.push_back(testutil::random_unit_vec(rng, 4));
  for (int i = 0; i < 3; ++i) q0.push_back(testutil::random_unit_vec(rng, 4));
  write_fvecs(tmp.file("m0.fvecs"), m0);
  write_fvecs(tmp.file("m1.fvecs"), m0);
  write_fvecs(tmp.file("q0.fvecs"), q0);
  DatasetManifest m;
  m.name = "toy";
  m.count = 6;
  m.modalities = {{"m0.fvecs", 4, false}, {"m1.fvecs", 4, false}};
  m.query_files = {"q0.fvecs", ""};
  m.dir = tmp.path;
  auto queries = load_queries(m);
  REQUIRE(queries.size() == 3);
  CHECK(queries[0].present(0));
  CHECK_FALSE(queries[0].present(1));
  CHECK(queries[2].parts[0] == q0[2]);
}

}  // TEST_SUITE
