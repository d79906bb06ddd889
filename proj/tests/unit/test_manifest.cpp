#include "doctest.h"
#include "fixtures.hpp"
#include "lpsim/error.hpp"
#include "lpsim/manifest.hpp"

using namespace lpsim;

TEST_CASE("fnv1a matches the published 64-bit test vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("file_checksum hashes the raw bytes") {
  fixtures::TempDir tmp("manifest");
  fixtures::write_file(tmp.file("f.txt"), "abc\n");
  CHECK(file_checksum(tmp.file("f.txt")) == fnv1a_hex("abc\n"));
  CHECK_THROWS_AS(file_checksum(tmp.file("missing.txt")), MissingInputError);
}

TEST_CASE("manifests record inputs and outputs with checksums") {
  fixtures::TempDir tmp("manifest");
  fixtures::write_file(tmp.file("in.txt"), "input-bytes");
  fixtures::write_file(tmp.file("out.txt"), "output-bytes");

  Manifest m;
  m.command = "simulate";
  m.seed = 42;
  m.config_hash = fnv1a_hex("n_gen=5\n");
  m.config_entries.emplace_back("n_gen", "5");
  m.add_input(tmp.file("in.txt"));
  m.add_output(tmp.file("out.txt"));
  m.timings_sec.emplace_back("total", 0.25);
  m.write(tmp.file("manifest.txt"));

  const std::string text = fixtures::read_file(tmp.file("manifest.txt"));
  CHECK(text.find("simulate") != std::string::npos);
  CHECK(text.find("42") != std::string::npos);
  CHECK(text.find(fnv1a_hex("input-bytes")) != std::string::npos);
  CHECK(text.find(fnv1a_hex("output-bytes")) != std::string::npos);
  CHECK(text.find("n_gen") != std::string::npos);

  CHECK_THROWS_AS(m.add_input(tmp.file("nope.txt")), MissingInputError);
}
