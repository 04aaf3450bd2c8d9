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

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "test_util.hpp"

#ifndef MSTM_CLI_DEFAULT
#define MSTM_CLI_DEFAULT "mstm"
#endif

namespace {

std::string cli_path() {
  if (const char* env = std::getenv("MSTM_CLI")) return env;
  return MSTM_CLI_DEFAULT;
}

int run_cli(const std::string& args, const std::string& log) {
  std::string cmd = cli_path() + " " + args + " >" + log + " 2>&1";
  int rc = std::system(cmd.c_str());
  return rc;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_spec(const std::string& path, std::size_t count,
                std::size_t queries, std::uint64_t seed) {
  std::ofstream out(path);
  out << "{\n"
      << "  \"name\": \"cli_smoke\",\n"
      << "  \"count\": " << count << ",\n"
      << "  \"dims\": [10, 6],\n"
      << "  \"clusters\": 12,\n"
      << "  \"noise_scale\": 0.25,\n"
      << "  \"query_noise\": 0.1,\n"
      << "  \"queries\": " << queries << ",\n"
      << "  \"rng_seed\": " << seed << "\n"
      << "}\n";
}

void write_weights(const std::string& path) {
  std::ofstream out(path);
  out << "{\"0\": 0.81, \"1\": 0.25}\n";
}

struct Pipeline {
  testutil::TempDir tmp;
  std::string spec, manifest, weights, truth, index, log;

  Pipeline() {
    spec = tmp.file("spec.json");
    manifest = tmp.file("cli_smoke.json");
    weights = tmp.file("weights.json");
    truth = tmp.file("truth.ivecs");
    index = tmp.file("graph.idx");
    log = tmp.file("log.txt");
    write_spec(spec, 600, 30, 11);
    write_weights(weights);
  }

  int gen() {
    return run_cli("--seed 11 gen --spec " + spec + " --out " + tmp.path,
                   log);
  }
  int gt() {
    return run_cli("gt --manifest " + manifest + " --weights " + weights +
                       " --k 10 --out " + truth,
                   log);
  }
  int build() {
    return run_cli("build --manifest " + manifest + " --weights " + weights +
                       " --gamma 16 --epsilon 3 --out " + index,
                   log);
  }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and bad invocations") {
  testutil::TempDir tmp;
  std::string log = tmp.file("log.txt");
  CHECK(run_cli("--help", log) == 0);
  CHECK(slurp(log).find("gen") != std::string::npos);

  CHECK(run_cli("", log) != 0);
  CHECK(run_cli("frobnicate", log) != 0);
  CHECK(run_cli("gen --spec /nonexistent/spec.json --out /tmp", log) != 0);
  CHECK(slurp(log).find("not exist") != std::string::npos);

  std::string junk = tmp.file("junk.json");
  {
    std::ofstream out(junk);
    out << "this is not json\n";
  }
  CHECK(run_cli("gen --spec " + junk + " --out " + tmp.path, log) != 0);
  std::string msg = slurp(log);
  for (auto& c : msg) c = static_cast<char>(std::tolower(c));
  CHECK(msg.find("error") != std::string::npos);
}

TEST_CASE("pipeline produces consistent artifacts") {
  Pipeline p;
  REQUIRE(p.gen() == 0);
  CHECK(testutil::read_bytes(p.manifest).size() > 0);
  REQUIRE(p.gt() == 0);
  REQUIRE(p.build() == 0);
  CHECK(slurp(p.log).find("repairs") != std::string::npos);

  std::string results = p.tmp.file("results.csv");
  int rc = run_cli("search --manifest " + p.manifest + " --index " + p.index +
                       " --k 10 --l 150 --out " + results,
                   p.log);
  REQUIRE(rc == 0);
  std::ifstream in(results);
  std::string header;
  std::getline(in, header);
  CHECK(header == "query,rank,id,score");
  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 30 * 10);

  std::string bench = p.tmp.file("bench.csv");
  rc = run_cli("bench --manifest " + p.manifest + " --index " + p.index +
                   " --weights " + p.weights + " --truth " + p.truth +
                   " --frameworks must,must-exact --l-sweep 100,200 --k 10" +
                   " --trials 1 --out " + bench,
               p.log);
  REQUIRE(rc == 0);
  std::string table = slurp(p.log);
  CHECK(table.find("must-exact") != std::string::npos);
  std::string csv = slurp(bench);
  CHECK(csv.find("must,100,") != std::string::npos);
  CHECK(csv.find("must,200,") != std::string::npos);
}

TEST_CASE("reruns are byte identical") {
  Pipeline p;
  REQUIRE(p.gen() == 0);
  REQUIRE(p.gt() == 0);
  REQUIRE(p.build() == 0);
  auto truth1 = testutil::read_bytes(p.truth);
  auto index1 = testutil::read_bytes(p.index);

  REQUIRE(p.gt() == 0);
  REQUIRE(p.build() == 0);
  CHECK(testutil::read_bytes(p.truth) == truth1);
  CHECK(testutil::read_bytes(p.index) == index1);

  std::string r1 = p.tmp.file("r1.csv");
  std::string r2 = p.tmp.file("r2.csv");
  REQUIRE(run_cli("search --manifest " + p.manifest + " --index " + p.index +
                      " --k 5 --l 100 --out " + r1,
                  p.log) == 0);
  REQUIRE(run_cli("search --manifest " + p.manifest + " --index " + p.index +
                      " --k 5 --l 100 --out " + r2,
                  p.log) == 0);
  CHECK(testutil::read_bytes(r1) == testutil::read_bytes(r2));
}

TEST_CASE("seed switches the generated dataset") {
  testutil::TempDir a;
  testutil::TempDir b;
  std::string log = a.file("log.txt");
  std::string spec_a = a.file("spec.json");
  std::string spec_b = b.file("spec.json");
  write_spec(spec_a, 200, 5, 7);
  write_spec(spec_b, 200, 5, 7);

  REQUIRE(run_cli("--seed 7 gen --spec " + spec_a + " --out " + a.path,
                  log) == 0);
  REQUIRE(run_cli("--seed 8 gen --spec " + spec_b + " --out " + b.path,
                  log) == 0);
  auto mod_a = testutil::read_bytes(a.file("cli_smoke_base_0.fvecs"));
  auto mod_b = testutil::read_bytes(b.file("cli_smoke_base_0.fvecs"));
  CHECK(mod_a != mod_b);

  // Same seed again reproduces the first byte stream.
  testutil::TempDir c;
  std::string spec_c = c.file("spec.json");
  write_spec(spec_c, 200, 5, 7);
  REQUIRE(run_cli("--seed 7 gen --spec " + spec_c + " --out " + c.path,
                  log) == 0);
  CHECK(testutil::read_bytes(c.file("cli_smoke_base_0.fvecs")) == mod_a);
}

TEST_CASE("search rejects mismatched weights") {
  Pipeline p;
  REQUIRE(p.gen() == 0);
  REQUIRE(p.build() == 0);
  std::string bad = p.tmp.file("bad_weights.json");
  {
    std::ofstream out(bad);
    out << "{\"0\": 0.5, \"1\": 0.3, \"2\": 0.2}\n";
  }
  std::string results = p.tmp.file("r.csv");
  CHECK(run_cli("search --manifest " + p.manifest + " --index " + p.index +
                    " --weights " + bad + " --k 5 --l 50 --out " + results,
                p.log) != 0);
  CHECK(slurp(p.log).find("error") != std::string::npos);
}

}  // TEST_SUITE
