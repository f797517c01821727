#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;
using json = nlohmann::json;
using doctest::Approx;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("cbplab_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

int cbplab(const std::string& args) {
  const std::string cmd = std::string(CBPLAB_BIN) + " " + args + " 2>" + path("stderr.txt") + " >/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

json load(const std::string& name) {
  std::ifstream is(path(name));
  return json::parse(is);
}

std::string slurp(const std::string& name) {
  std::ifstream is(path(name));
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string cache() { return "--cache-dir " + path("cache"); }

}  // namespace

TEST_CASE("volume of the six-dimensional ball") {
  REQUIRE(cbplab(cache() + " --out " + path("v6.json") + " volume --body ball:dim=6 --rule gauss:level=40") == 0);
  const json r = load("v6.json");
  CHECK(r["results"][0]["value"].get<double>() == Approx(std::pow(M_PI, 3) / 6).epsilon(1e-6));
  CHECK(r["baselines_checked"][0]["pass"].get<bool>());
  CHECK(r["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("cache hits, seed misses and recomputation") {
  const std::string args = " volume --body clq:n=4,q=4 --rule qmc:n=2^14,seed=3";
  REQUIRE(cbplab(cache() + " --out " + path("a.json") + args) == 0);
  REQUIRE(cbplab(cache() + " --out " + path("b.json") + args) == 0);
  REQUIRE(cbplab(cache() + " --no-cache --out " + path("c.json") + args) == 0);
  REQUIRE(cbplab(cache() + " --seed 4 --out " + path("d.json") + args) == 0);
  const json a = load("a.json"), b = load("b.json"), c = load("c.json"), d = load("d.json");
  CHECK_FALSE(a["cached"].get<bool>());
  CHECK(b["cached"].get<bool>());
  CHECK_FALSE(c["cached"].get<bool>());
  CHECK_FALSE(d["cached"].get<bool>());
  CHECK(a["results"].dump() == b["results"].dump());
  CHECK(a["results"].dump() == c["results"].dump());
  CHECK(a["config_hash"] == c["config_hash"]);
  CHECK(a["config_hash"] != d["config_hash"]);
  CHECK(a["results"][0]["value"] != d["results"][0]["value"]);
}

TEST_CASE("corrupted cache entry is recomputed") {
  const std::string args = " volume --body ball:dim=4 --rule qmc:n=2^12,seed=9";
  REQUIRE(cbplab(cache() + " --out " + path("e.json") + args) == 0);
  const json e = load("e.json");
  const fs::path entry = workdir() / "cache" / (e["config_hash"].get<std::string>() + ".json");
  REQUIRE(fs::exists(entry));
  {
    std::ofstream os(entry, std::ios::trunc);
    os << "{\"record\": 1";
  }
  REQUIRE(cbplab(cache() + " --out " + path("f.json") + args) == 0);
  const json f = load("f.json");
  CHECK_FALSE(f["cached"].get<bool>());
  CHECK(slurp("stderr.txt").find("warning") != std::string::npos);
  CHECK(e["results"].dump() == f["results"].dump());
}

TEST_CASE("worker count does not change reports") {
  const std::string args = " ft --body 'mollify:base=(clq:n=3,q=4),width=0.05' --p 2 --grid grid:dim=6,res=8,reduce=orbit";
  REQUIRE(cbplab("--no-cache --workers 1 --out " + path("w1.json") + args) == 0);
  REQUIRE(cbplab("--no-cache --workers 4 --out " + path("w4.json") + args) == 0);
  CHECK(slurp("w1.json") == slurp("w4.json"));
}

TEST_CASE("exit codes and usage errors") {
  CHECK(cbplab("--no-cache volume --body clq:n=4,qq=4") == 1);
  CHECK(slurp("stderr.txt").find("qq=4") != std::string::npos);
  CHECK(cbplab("--no-cache volume --body ball:dim=6 --rule gauss:lvl=3") == 1);
  CHECK(cbplab("--no-cache ft --body ball:dim=6 --p 2 --xi 1,0,0") == 1);
  CHECK(cbplab("--no-cache --nodes 100 volume --body ball:dim=4 --rule gauss:level=8") == 1);
  CHECK(cbplab("--no-cache scan --body ball:dim=8 --p 2 --grid grid:dim=6,res=8") == 1);
  CHECK(cbplab("frobnicate") == 1);
  // no pair exists in complex dimension three
  CHECK(cbplab("--no-cache --out " + path("n3.json") + " bp-construct --n 3 --q 4") == 2);
  CHECK(load("n3.json")["results"][0]["verdict"] == "construction_impossible");
}

TEST_CASE("scan of the complex l4 ball finds negativity") {
  REQUIRE(cbplab(cache() + " --out " + path("scan.json") + " --csv " + path("scan.csv") +
                 " scan --body clq:n=4,q=4 --p 2 --grid grid:dim=8,res=16,reduce=orbit,seed=7") == 0);
  const json r = load("scan.json");
  const json& v = r["results"][0];
  CHECK(v["conclusion"] == "negativity_witness");
  CHECK(v["min_value"].get<double>() < -3 * v["min_stderr"].get<double>());
  CHECK(v["confirmation"]["agree"].get<bool>());
  const std::string csv = slurp("scan.csv");
  CHECK(csv.rfind("p,xi,value,stderr,bias,method,noisy\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(v["values"].size()));
}

TEST_CASE("constructed pair replays through bp-verify") {
  REQUIRE(cbplab(cache() + " --out " + path("pair.json") + " bp-construct --n 4 --q 4") == 0);
  REQUIRE(cbplab(cache() + " --out " + path("verify.json") + " bp-verify --pair " + path("pair.json")) == 0);
  const json c = load("pair.json"), v = load("verify.json");
  CHECK(c["results"][0]["verdict"] == "violation");
  CHECK(v["results"][0]["verdict"] == "violation");
  CHECK(v["inputs"]["parent_config_hash"] == c["config_hash"]);
  CHECK(v["results"][0]["parent_config_hash"] == c["config_hash"]);
  CHECK(v["results"][0]["gaps"].dump() == c["results"][0]["gaps"].dump());
  CHECK(v["results"][0]["vol_diff"].dump() == c["results"][0]["vol_diff"].dump());
  // the cached construction writes the same pair file
  REQUIRE(cbplab(cache() + " --out " + path("pair2.json") + " bp-construct --n 4 --q 4") == 0);
  const json c2 = load("pair2.json");
  CHECK(c2["cached"].get<bool>());
  CHECK(c2["pair"].dump() == c["pair"].dump());
}
