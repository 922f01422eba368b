#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "wimax60/metrics.hpp"

#ifdef WIMAX60_CLI_PATH

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("wimax60_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path operator/(const std::string& s) const { return dir / s; }
};

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + WIMAX60_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("cli: malformed config exits 2 and writes nothing") {
  Scratch s("badcfg");
  write(s / "bad.cfg", "[frame]\nn_fft = 256\nfrobnicate = 3\n");
  const int rc = run("--config " + (s / "bad.cfg").string() + " --out " + (s / "o").string() + " loopback", s / "log");
  CHECK(rc == 2);
  CHECK(slurp(s / "log").find("line 3") != std::string::npos);
  CHECK(!fs::exists(s / "o" / "report.txt"));
  CHECK(!fs::exists(s / "o" / "rx.iqcap"));
}

TEST_CASE("cli: unknown option exits 2") {
  Scratch s("badopt");
  CHECK(run("--bogus loopback", s / "log") == 2);
  CHECK(run("", s / "log") == 2);
}

TEST_CASE("cli: loopback then inspect") {
  Scratch s("loop");
  write(s / "run.cfg", "[run]\nbits = 5000\ncenter_freq = 60e9\n");
  REQUIRE(run("--config " + (s / "run.cfg").string() + " --seed 4 --out " + (s / "o").string() + " loopback", s / "log") == 0);
  for (const char* f : {"report.txt", "tx.iqcap", "rx.iqcap", "spectrum.csv", "constellation.csv", "estimate.csv"}) {
    CHECK(fs::exists(s / "o" / f));
  }
  const std::string report = slurp(s / "o" / "report.txt");
  CHECK(report.find("bit_errors=0\n") != std::string::npos);
  CHECK(report.find("seed=4\n") != std::string::npos);

  const auto cap = wimax60::capture_read((s / "o" / "rx.iqcap").string());
  REQUIRE(run("--out " + (s / "i").string() + " inspect " + (s / "o" / "rx.iqcap").string(), s / "log2") == 0);
  const std::string out = slurp(s / "log2");
  CHECK(out.find("sample_count=" + std::to_string(cap.buffer.size()) + "\n") != std::string::npos);
  CHECK(out.find("sample_rate=2240000\n") != std::string::npos);
  CHECK(out.find("center_freq=60000000000\n") != std::string::npos);
  CHECK(fs::exists(s / "i" / "rx_spectrum.csv"));
}

TEST_CASE("cli: corrupt capture is a runtime error") {
  Scratch s("corrupt");
  write(s / "x.iqcap", std::string("NOTACAPTUREFILE_") + std::string(40, '\0'));
  CHECK(run("--out " + (s / "o").string() + " inspect " + (s / "x.iqcap").string(), s / "log") == 3);
  CHECK(run("inspect " + (s / "missing.iqcap").string(), s / "log") != 0);
}

TEST_CASE("cli: sweep argument errors") {
  Scratch s("sweeperr");
  CHECK(run("--out " + (s / "o").string() + " sweep", s / "log") == 2);
  CHECK(run("--out " + (s / "o").string() + " sweep --ebn0 1,x", s / "log") == 2);
}

TEST_CASE("cli: sweep output is byte-identical across runs") {
  Scratch s("sweep");
  write(s / "run.cfg", "[run]\nbits = 20000\n[sweep]\nebn0_db = 2, 6\n");
  const std::string base = "--config " + (s / "run.cfg").string() + " --seed 9 ";
  REQUIRE(run(base + "--out " + (s / "a").string() + " sweep", s / "log") == 0);
  REQUIRE(run(base + "--out " + (s / "b").string() + " sweep", s / "log") == 0);
  for (const char* f : {"sweep.csv", "sweep_point_0_rx.iqcap", "sweep_point_1_rx.iqcap"}) {
    REQUIRE(fs::exists(s / "a" / f));
    CHECK(slurp(s / "a" / f) == slurp(s / "b" / f));
  }
  REQUIRE(run("--config " + (s / "run.cfg").string() + " --seed 10 --out " + (s / "c").string() + " sweep", s / "log") == 0);
  CHECK(slurp(s / "a" / "sweep_point_0_rx.iqcap") != slurp(s / "c" / "sweep_point_0_rx.iqcap"));
}

TEST_CASE("cli: make-profile output loads back") {
  Scratch s("profile");
  REQUIRE(run("make-profile " + (s / "p.txt").string(), s / "log") == 0);
  write(s / "run.cfg", "[channel]\nprofile = " + (s / "p.txt").string() + "\nebn0_db = 30\n[run]\nbits = 5000\n");
  CHECK(run("--config " + (s / "run.cfg").string() + " --out " + (s / "o").string() + " loopback", s / "log") == 0);
}

#endif
