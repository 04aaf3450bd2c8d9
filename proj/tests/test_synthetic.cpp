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
#include <vector>

#include <doctest.h>

#include "mstm/io.hpp"
#include "mstm/similarity.hpp"
#include "mstm/synthetic.hpp"
#include "test_util.hpp"

using namespace mstm;

namespace {

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.name = "toy";
  spec.count = 300;
  spec.dims = {8, 6};
  spec.clusters = 10;
  spec.noise_scale = 0.2;
  spec.queries = 40;
  spec.rng_seed = 17;
  return spec;
}

double norm_sq(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return s;
}

}  // namespace

TEST_SUITE("synthetic") {

TEST_CASE("shapes and ranges") {
  SyntheticSpec spec = small_spec();
  SyntheticData out = generate_synthetic(spec);
  CHECK(out.objects.size() == spec.count);
  CHECK(out.objects.modalities() == 2);
  CHECK(out.objects.dim(0) == 8);
  CHECK(out.objects.dim(1) == 6);
  REQUIRE(out.queries.size() == spec.queries);
  CHECK(out.sources.size() == spec.queries);
  CHECK(out.labels.size() == spec.count);
  for (std::uint32_t src : out.sources) CHECK(src < spec.count);
  for (std::uint32_t lab : out.labels) CHECK(lab < spec.clusters);
  for (const auto& q : out.queries) {
    REQUIRE(q.parts.size() == 2);
    CHECK(q.parts[0].size() == 8);
    CHECK(q.parts[1].size() == 6);
  }
}

TEST_CASE("all vectors unit norm") {
  SyntheticData out = generate_synthetic(small_spec());
  for (std::size_t mod = 0; mod < 2; ++mod)
    for (std::size_t id = 0; id < out.objects.size(); ++id)
      CHECK(std::abs(norm_sq(out.objects.vec(mod, id)) - 1.0) < 1e-5);
  for (const auto& q : out.queries)
    for (const auto& part : q.parts)
      CHECK(std::abs(norm_sq(part) - 1.0) < 1e-5);
}

TEST_CASE("fixed seed regenerates identical data") {
  SyntheticData a = generate_synthetic(small_spec());
  SyntheticData b = generate_synthetic(small_spec());
  CHECK(a.objects.fingerprint() == b.objects.fingerprint());
  CHECK(a.sources == b.sources);
  CHECK(a.labels == b.labels);
  for (std::size_t q = 0; q < a.queries.size(); ++q)
    CHECK(a.queries[q].parts == b.queries[q].parts);

  SyntheticSpec other = small_spec();
  other.rng_seed = 18;
  SyntheticData c = generate_synthetic(other);
  CHECK(a.objects.fingerprint() != c.objects.fingerprint());
}

TEST_CASE("zero noise collapses objects onto cluster centers") {
  SyntheticSpec spec = small_spec();
  spec.noise_scale = 0.0;
  SyntheticData out = generate_synthetic(spec);
  // Same label means the identical vector in every modality.
  for (std::size_t a = 0; a < out.objects.size(); ++a)
    for (std::size_t b = a + 1; b < std::min(out.objects.size(), a + 40);
         ++b) {
      if (out.labels[a] != out.labels[b]) continue;
      for (std::size_t mod = 0; mod < 2; ++mod) {
        auto va = out.objects.vec(mod, a);
        auto vb = out.objects.vec(mod, b);
        CHECK(std::equal(va.begin(), va.end(), vb.begin()));
      }
    }
}

TEST_CASE("clusters are tighter than the background") {
  SyntheticData out = generate_synthetic(small_spec());
  double intra = 0.0, cross = 0.0;
  std::size_t n_intra = 0, n_cross = 0;
  for (std::size_t a = 0; a < 120; ++a)
    for (std::size_t b = a + 1; b < 120; ++b) {
      double ip = inner_product(out.objects.vec(0, a), out.objects.vec(0, b));
      if (out.labels[a] == out.labels[b]) {
        intra += ip;
        ++n_intra;
      } else {
        cross += ip;
        ++n_cross;
      }
    }
  REQUIRE(n_intra > 0);
  REQUIRE(n_cross > 0);
  CHECK(intra / n_intra > cross / n_cross + 0.3);
}

TEST_CASE("queries stay close to their source objects") {
  SyntheticData out = generate_synthetic(small_spec());
  double mean = 0.0;
  for (std::size_t q = 0; q < out.queries.size(); ++q) {
    double ip = inner_product(out.queries[q].parts[0],
                              out.objects.vec(0, out.sources[q]));
    CHECK(ip > 0.65);
    mean += ip;
  }
  CHECK(mean / static_cast<double>(out.queries.size()) > 0.72);
}

TEST_CASE("noise modality ignores cluster labels") {
  SyntheticSpec spec = small_spec();
  spec.noise_modality = 1;
  spec.count = 400;
  SyntheticData out = generate_synthetic(spec);

  double intra = 0.0, cross = 0.0;
  std::size_t n_intra = 0, n_cross = 0;
  for (std::size_t a = 0; a < 150; ++a)
    for (std::size_t b = a + 1; b < 150; ++b) {
      double ip = inner_product(out.objects.vec(1, a), out.objects.vec(1, b));
      if (out.labels[a] == out.labels[b]) {
        intra += ip;
        ++n_intra;
      } else {
        cross += ip;
        ++n_cross;
      }
    }
  // No cluster advantage in the noise modality.
  CHECK(std::abs(intra / n_intra - cross / n_cross) < 0.2);

  // The signal modality keeps its structure and queries still track it.
  double mean = 0.0;
  for (std::size_t q = 0; q < out.queries.size(); ++q) {
    double sig = inner_product(out.queries[q].parts[0],
                               out.objects.vec(0, out.sources[q]));
    CHECK(sig > 0.6);
    mean += sig;
  }
  CHECK(mean / static_cast<double>(out.queries.size()) > 0.7);
}

TEST_CASE("query noise defaults to the object noise scale") {
  SyntheticSpec a = small_spec();
  SyntheticSpec b = small_spec();
  b.query_noise = b.noise_scale;
  SyntheticData da = generate_synthetic(a);
  SyntheticData db = generate_synthetic(b);
  for (std::size_t q = 0; q < da.queries.size(); ++q)
    CHECK(da.queries[q].parts == db.queries[q].parts);
}

TEST_CASE("written dataset loads back identically") {
  testutil::TempDir tmp;
  SyntheticSpec spec = small_spec();
  SyntheticData out = generate_synthetic(spec);
  std::string manifest_path = write_synthetic(tmp.path, spec, out);
  DatasetManifest manifest = read_manifest(manifest_path);
  CHECK(manifest.count == spec.count);
  auto data = load_dataset(manifest);
  CHECK(data.fingerprint() == out.objects.fingerprint());
  auto queries = load_queries(manifest);
  REQUIRE(queries.size() == out.queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q)
    CHECK(queries[q].parts == out.queries[q].parts);
  auto sources = read_ivecs(tmp.file(spec.name + "_sources.ivecs"));
  REQUIRE(sources.size() == out.sources.size());
  for (std::size_t q = 0; q < sources.size(); ++q)
    CHECK(sources[q][0] == static_cast<std::int32_t>(out.sources[q]));
}

}  // TEST_SUITE
