#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tunnelsplit/io.hpp"

using namespace tunnelsplit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const char* name) {
  const fs::path p = fs::temp_directory_path() / ("tunnelsplit_io_" + std::string(name));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("doubles round trip with 17 digits") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
      const std::string s = io::format_double(v);
      double back = 0.0;
      std::from_chars(s.data(), s.data() + s.size(), back);
      CHECK(back == v);
      CHECK(s.find(',') == std::string::npos);
    }
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    CHECK(io::format_double(NAN) == "nan");
    CHECK(io::format_double(-INFINITY) == "-inf");
  }

  TEST_CASE("csv layout") {
    io::CsvBuilder csv({"a", "b"});
    csv.row({1.0, 2.0}).raw_row({"x", io::csv_text("p,q")});
    CHECK(csv.str() == "a,b\n1,2\nx,\"p,q\"\n");
    CHECK_THROWS(csv.row({1.0}));
  }

  TEST_CASE("sha256 test vector") {
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("atomic write leaves no temporary behind") {
    const fs::path dir = scratch("atomic");
    io::write_atomic(dir / "f.txt", "one");
    io::write_atomic(dir / "f.txt", "two");
    CHECK(slurp(dir / "f.txt") == "two");
    CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
    fs::remove_all(dir);
  }

  TEST_CASE("manifest records config hash and checksums, and is reproducible") {
    const fs::path dir = scratch("manifest");
    const nlohmann::json cfg{{"seed", 1}};
    auto run = [&] {
      io::OutputDir out(dir, cfg, "test");
      out.write("a.csv", "x\n1\n");
      out.set_results({{"ok", true}});
      out.finish();
      return slurp(dir / "manifest.json");
    };
    const std::string first = run();
    CHECK(run() == first);
    const auto m = nlohmann::json::parse(first);
    CHECK(m["command"] == "test");
    CHECK(m["version"] == TUNNELSPLIT_VERSION);
    CHECK(m["config_sha256"] == io::sha256_hex(cfg.dump()));
    CHECK(m["files"]["a.csv"]["sha256"] == io::sha256_hex("x\n1\n"));
    CHECK(m["results"]["ok"] == true);
    fs::remove_all(dir);
  }
}
