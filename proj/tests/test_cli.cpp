#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  const char *env = std::getenv("PHASECODE_TEST_DIR");
  fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "phasecode_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path fresh(const std::string &name) {
  const fs::path p = work_dir() / name;
  fs::remove_all(p);
  return p;
}

int run(const std::string &args, const std::string &env = "") {
  const std::string cmd = env + " " + PHASECODE_CLI + std::string(" ") + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path &p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

} // namespace

TEST_CASE("consecutive psd peaks near 0.37 / T") {
  const auto out = fresh("psd");
  REQUIRE(run("psd --scheme consecutive --Tprime 0 --out " + out.string()) == 0);
  const auto summary = nlohmann::json::parse(slurp(out / "psd_summary.json"));
  CHECK(summary["peak_nu_times_T"].get<double>() == doctest::Approx(0.371).epsilon(0.01));
  const auto rows = read_csv(out / "psd.csv");
  CHECK(rows[0] == std::vector<std::string>{"nu_times_T", "signal_normalized", "noise_normalized"});
  CHECK(rows.size() == 4097);
}

TEST_CASE("capacity sweep keeps the regime ordering at every budget") {
  const auto out = fresh("capacity");
  REQUIRE(run("capacity-sweep --n_min 1 --n_max 100 --points 20 --out " + out.string()) == 0);
  const auto rows = read_csv(out / "capacity_sweep.csv");
  REQUIRE(rows.size() == 61);
  CHECK(rows[0][0] == "n_bar");
  std::map<std::string, std::map<std::string, double>> by_n;
  for (std::size_t i = 1; i < rows.size(); ++i) by_n[rows[i][0]][rows[i][1]] = std::stod(rows[i][2]);
  CHECK(by_n.size() == 20);
  for (auto &[n, r] : by_n) {
    CHECK(r["both_squeezed"] > r["one_squeezed"]);
    CHECK(r["one_squeezed"] > r["both_coherent"]);
  }
}

TEST_CASE("high-SNR channel simulation makes no symbol errors") {
  const auto out = fresh("channel");
  REQUIRE(run("channel-sim --seed 12 --alpha 4 --beta 4 --pits 10000 --out " + out.string()) == 0);
  const auto rows = read_csv(out / "channel_sim.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][2] == "symbol_errors");
  CHECK(rows[1][0] == "10000");
  CHECK(rows[1][2] == "0");
  CHECK(fs::exists(out / "track.txt"));
}

TEST_CASE("identical config and seed give byte-identical outputs, and replay reproduces them") {
  const auto a = fresh("repro_a"), b = fresh("repro_b"), c = fresh("repro_c");
  const std::string args = "channel-sim --seed 5 --levels 16 --alpha 3.6 --beta 3.6 --pits 500 --trials 2";
  REQUIRE(run(args + " --out " + a.string()) == 0);
  REQUIRE(run(args + " --out " + b.string()) == 0);
  REQUIRE(run("replay " + (a / "manifest.json").string() + " --out " + c.string()) == 0);
  for (const char *f : {"channel_sim.csv", "track.txt", "manifest.json"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(c / f));
  }
  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["seed"].get<int>() == 5);
  CHECK(m["command"] == "channel-sim");
  CHECK(m["config"]["levels"] == "16");
  CHECK(m.contains("version"));
}

TEST_CASE("config file is read and flags override it") {
  const auto out = fresh("config");
  fs::create_directories(out);
  {
    std::ofstream cfg(out / "run.cfg");
    cfg << "# psd settings\nscheme = consecutive\nTprime = 1\npoints = 512\n";
  }
  REQUIRE(run("psd --config " + (out / "run.cfg").string() + " --points 256 --out " + out.string()) == 0);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["config"]["scheme"] == "consecutive");
  CHECK(m["config"]["Tprime"] == "1");
  CHECK(m["config"]["points"] == "256");
  CHECK(read_csv(out / "psd.csv").size() == 257);
  {
    std::ofstream cfg(out / "bad.cfg");
    cfg << "schema = single\n";
  }
  CHECK(run("psd --config " + (out / "bad.cfg").string() + " --out " + (out / "bad").string()) == 2);
}

TEST_CASE("output directory defaults to the environment variable") {
  const auto out = fresh("env_out");
  REQUIRE(run("snr-sweep --points 5", "PHASECODE_OUT_DIR=" + out.string()) == 0);
  CHECK(read_csv(out / "snr_sweep.csv").size() == 6);
  CHECK(read_csv(out / "snr_sweep.csv")[0].size() == 9);
}

TEST_CASE("validation errors exit 2 and leave no outputs") {
  const auto out = fresh("invalid");
  CHECK(run("detect --theta 4 --out " + out.string()) == 2);
  CHECK(run("psd --T -1 --out " + out.string()) == 2);
  CHECK(run("channel-sim --pits 10 --out " + out.string()) == 2); // no seed
  CHECK(run("channel-sim --seed 1 --levels 64 --phi_steps 32 --out " + out.string()) == 2);
  CHECK(run("capacity-sweep --n_min 0 --out " + out.string()) == 2);
  CHECK(run("decode --transform u0 --out " + out.string()) == 2);
  CHECK(run("psd --nonsense 3 --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("unresolvable outcomes exit 3") {
  const auto out = fresh("unresolved");
  CHECK(run("decode --alpha 0 --out " + out.string()) == 3);
  CHECK(run("channel-sim --seed 1 --alpha 0 --pits 50 --out " + out.string()) == 3);
  CHECK(run("capacity-sweep --n_min 0.1 --n_max 0.1 --points 1 --out " + out.string()) == 3);
  CHECK(fs::exists(out / "decode.json"));
}

TEST_CASE("decode and detect report the encoded symbol") {
  const auto out = fresh("decode");
  REQUIRE(run("decode --transform -uf0 --theta 1.2 --alpha 2 --beta 3 --out " + out.string()) == 0);
  const auto d = nlohmann::json::parse(slurp(out / "decode.json"));
  CHECK(d["transform"] == "-uf0");
  CHECK(d["theta"].get<double>() == doctest::Approx(1.2));
  const auto det = fresh("detect");
  REQUIRE(run("detect --transform +uf0 --theta 0.3 --phi 1.8707963267948966 --grid_points 1024 --out " +
              det.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(det / "detect.json"));
  CHECK(j["combos"]["c"].get<double>() == doctest::Approx(2.0));
  CHECK(std::abs(j["combos"]["d"].get<double>()) < 1e-9);
  CHECK(read_csv(det / "phi_scan.csv").size() == 65);
}
