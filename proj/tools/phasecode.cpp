// phasecode: command-line front end. Every run writes its artifacts plus a
// manifest.json holding the resolved configuration, so `phasecode replay`
// can regenerate them byte for byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "phasecode/capacity.hpp"
#include "phasecode/channel.hpp"
#include "phasecode/detection.hpp"
#include "phasecode/errors.hpp"
#include "phasecode/format.hpp"
#include "phasecode/noise.hpp"
#include "phasecode/spectral.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace phasecode;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitUnresolved = 3;

struct Param {
  std::string name;
  std::string fallback;
  std::string help;
};

class Params {
public:
  explicit Params(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  const std::map<std::string, std::string> &all() const { return values_; }
  const std::string &str(const std::string &key) const { return values_.at(key); }
  double num(const std::string &key) const { return parse_double(str(key), key); }
  long long integer(const std::string &key) const { return parse_integer(str(key), key); }

  std::size_t count(const std::string &key, long long min) const {
    const long long v = integer(key);
    if (v < min) throw ValidationError(key + " must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  bool flag(const std::string &key) const {
    const auto &v = str(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ValidationError(key + " must be true or false, got '" + v + "'");
  }

  std::uint64_t seed() const {
    const auto &v = str("seed");
    if (v.empty()) throw ValidationError("seed is required for stochastic runs (--seed)");
    const long long s = parse_integer(v, "seed");
    if (s < 0) throw ValidationError("seed must be >= 0");
    return static_cast<std::uint64_t>(s);
  }

private:
  std::map<std::string, std::string> values_;
};

struct Artifact {
  std::string filename;
  std::string content;
};

struct RunOutput {
  std::vector<Artifact> artifacts;
  int status = kExitOk;
  std::string summary;
  std::optional<std::uint64_t> seed;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<Param> params;
  std::function<RunOutput(const Params &)> run;
};

// ---- shared parameter blocks ----

std::vector<Param> beam_params(const std::string &alpha, const std::string &beta) {
  return {{"alpha", alpha, "beam 3 (signal) amplitude, sqrt(photons per window)"},
          {"beta", beta, "beam 2 (reference) amplitude, sqrt(photons per window)"},
          {"sq_a_db", "0", "beam 3 measured-quadrature noise in dB (negative = squeezed)"},
          {"sq_b_db", "0", "beam 2 measured-quadrature noise in dB (negative = squeezed)"}};
}

BeamState beam3_of(const Params &p) { return BeamState::squeezed_db(p.num("alpha"), p.num("sq_a_db")); }
BeamState beam2_of(const Params &p, double phi = 0.0) {
  return BeamState::squeezed_db(p.num("beta"), p.num("sq_b_db"), phi);
}

PhaseSymbol symbol_of(const Params &p) { return PhaseSymbol(parse_transform(p.str("transform")), p.num("theta")); }

json beam_json(const BeamState &b) {
  return {{"amplitude", b.amplitude()}, {"phase", b.phase()}, {"v_plus", b.var_plus()}, {"v_minus", b.var_minus()}};
}

std::string dump(const json &j) { return j.dump(2) + "\n"; }

std::vector<double> sweep_points(double from, double to, std::size_t points, const std::string &spacing) {
  if (points < 1) throw ValidationError("points must be >= 1");
  if (!(to >= from)) throw ValidationError("sweep range must satisfy from <= to");
  std::vector<double> xs(points);
  if (spacing == "log") {
    if (!(from > 0.0)) throw ValidationError("log spacing needs a positive lower bound");
    for (std::size_t k = 0; k < points; ++k) {
      const double t = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
      xs[k] = std::exp(std::log(from) + t * (std::log(to) - std::log(from)));
    }
    xs.front() = from;
    xs.back() = to;
  } else if (spacing == "linear") {
    for (std::size_t k = 0; k < points; ++k) {
      const double t = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
      xs[k] = from + t * (to - from);
    }
  } else {
    throw ValidationError("spacing must be log or linear, got '" + spacing + "'");
  }
  return xs;
}

// ---- commands ----

RunOutput run_detect(const Params &p) {
  const auto symbol = symbol_of(p);
  const auto b3 = beam3_of(p);
  const auto b2 = beam2_of(p, p.num("phi"));
  const SpatialGrid grid(p.num("grid_extent"), p.count("grid_points", 2));
  const auto steps = p.count("phi_steps", 1);
  const auto trials = p.count("trials", 0);

  const auto sim = simulate_detection(symbol, b3, b2, grid);
  const auto table = table_signals(symbol, b3, b2);
  json out;
  out["symbol"] = {{"transform", std::string(to_string(symbol.transform()))}, {"theta", symbol.theta()}};
  out["beam3"] = beam_json(b3);
  out["beam2"] = beam_json(b2);
  out["segments"] = sim.segments;
  out["combos"] = {{"a", sim.combos.a}, {"b", sim.combos.b}, {"c", sim.combos.c}, {"d", sim.combos.d}};
  out["table_combos"] = {{"a", table.a}, {"b", table.b}, {"c", table.c}, {"d", table.d}};
  out["noise_var_c"] = sim.noise_var_c;
  out["noise_var_d"] = sim.noise_var_d;
  out["snr"] = snr(b3, b2, b2.phase() - symbol.theta());
  const auto delta = delta_theta_min(b3, b2);
  out["delta_theta_min"] = delta ? json(*delta) : json(nullptr);
  out["log2_l_max"] = delta ? json(std::log2(l_max_from_delta(*delta))) : json(nullptr);

  RunOutput r;
  if (trials > 0) {
    r.seed = p.seed();
    const auto stats = sample_shot_noise(sim, *r.seed, trials);
    out["monte_carlo"] = {{"trials", trials},
                          {"mean_c", stats.c.mean},
                          {"var_c", stats.c.variance()},
                          {"mean_d", stats.d.mean},
                          {"var_d", stats.d.variance()}};
  }
  std::ostringstream scan;
  write_phi_scan_csv(scan, symbol, b3, b2, grid, steps);
  r.artifacts = {{"detect.json", dump(out)}, {"phi_scan.csv", scan.str()}};
  r.summary = "combo_c " + format_double(sim.combos.c) + ", combo_d " + format_double(sim.combos.d);
  return r;
}

RunOutput run_decode(const Params &p) {
  const auto symbol = symbol_of(p);
  const auto b3 = beam3_of(p);
  const auto b2 = beam2_of(p);
  const auto steps = p.count("phi_steps", 8);
  const bool noisy = p.flag("noise");
  RunOutput r;
  Readout readout = table_readout(symbol, b3, b2);
  std::mt19937_64 engine;
  if (noisy) {
    r.seed = p.seed();
    engine.seed(*r.seed);
    readout = [&, clean = readout](double phi) {
      std::normal_distribution<double> normal(0.0, 1.0);
      DetectionResult d = clean(phi);
      d.combos.c += std::sqrt(d.noise_var_c) * normal(engine);
      d.combos.d += std::sqrt(d.noise_var_d) * normal(engine);
      return d;
    };
  }
  const auto dec = decode(readout, steps);
  json out;
  out["decided"] = dec.decided;
  out["transform"] = std::string(to_string(dec.symbol.transform()));
  out["theta"] = dec.symbol.theta();
  out["phi_opt"] = dec.phi_opt;
  out["confidence"] = dec.confidence;
  out["candidates"] = json::array();
  for (const auto &c : dec.candidates) {
    out["candidates"].push_back({{"transform", std::string(to_string(c.transform))},
                                 {"theta", c.theta},
                                 {"amplitude", c.amplitude},
                                 {"confidence", c.confidence}});
  }
  r.artifacts = {{"decode.json", dump(out)}};
  if (!dec.decided) {
    r.status = kExitUnresolved;
    r.summary = "undecidable: confidence " + format_double(dec.confidence) + " < 1";
  } else {
    r.summary = std::string(to_string(dec.symbol.transform())) + " theta " + format_double(dec.symbol.theta());
  }
  return r;
}

RunOutput run_snr_sweep(const Params &p) {
  const std::string variable = p.str("sweep");
  if (variable != "alpha" && variable != "beta" && variable != "sq_a_db" && variable != "sq_b_db") {
    throw ValidationError("sweep must be one of alpha, beta, sq_a_db, sq_b_db");
  }
  const auto xs = sweep_points(p.num("from"), p.num("to"), p.count("points", 1), p.str("spacing"));
  std::ostringstream csv_text;
  CsvWriter csv(csv_text);
  const std::string_view cols[] = {"alpha", "beta", "V_a_plus", "V_a_minus", "V_b_plus",
                                   "V_b_minus", "snr", "delta_theta_min", "log2_l_max"};
  csv.header(cols);
  std::size_t resolved = 0;
  for (double x : xs) {
    auto values = p.all();
    values[variable] = format_double(x);
    const Params point(values);
    const auto b3 = beam3_of(point);
    const auto b2 = beam2_of(point);
    const auto d = delta_theta_min(b3, b2);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double s = (b3.amplitude() > 0.0 || b2.amplitude() > 0.0) ? snr(b3, b2, std::numbers::pi / 2) : 0.0;
    const double row[] = {b3.amplitude(), b2.amplitude(), b3.var_plus(), b3.var_minus(), b2.var_plus(), b2.var_minus(),
                          s, d ? *d : nan, d ? std::log2(l_max_from_delta(*d)) : nan};
    csv.row(row);
    resolved += d ? 1 : 0;
  }
  RunOutput r;
  r.artifacts = {{"snr_sweep.csv", csv_text.str()}};
  r.summary = std::to_string(resolved) + "/" + std::to_string(xs.size()) + " points resolvable";
  if (resolved == 0) r.status = kExitUnresolved;
  return r;
}

RunOutput run_capacity_sweep(const Params &p) {
  const auto xs = sweep_points(p.num("n_min"), p.num("n_max"), p.count("points", 1), p.str("spacing"));
  std::vector<CapacityRegime> regimes;
  std::stringstream list(p.str("regimes"));
  for (std::string item; std::getline(list, item, ',');) {
    if (item == "all") {
      regimes = {CapacityRegime::BothCoherent, CapacityRegime::OneSqueezed, CapacityRegime::BothSqueezed};
    } else {
      regimes.push_back(parse_capacity_regime(item));
    }
  }
  if (regimes.empty()) throw ValidationError("regimes must name at least one regime");
  for (double n : xs) optimize_capacity({n, CapacityRegime::BothCoherent}); // validates the whole range first

  std::ostringstream text;
  CsvWriter csv(text);
  const std::string_view cols[] = {"n_bar", "regime", "log2_lmax", "alpha", "beta", "squeezing_dB_beam1",
                                   "squeezing_dB_beam2"};
  csv.header(cols);
  std::size_t resolved = 0;
  for (double n : xs) {
    for (auto regime : regimes) {
      const auto res = optimize_capacity({n, regime});
      const double nan = std::numeric_limits<double>::quiet_NaN();
      const std::string cells[] = {format_double(n),
                                   std::string(to_string(regime)),
                                   format_double(res.resolvable ? res.log2_levels : nan),
                                   format_double(res.beam1.alpha),
                                   format_double(res.beam2.alpha),
                                   format_double(res.beam1.squeezing_db()),
                                   format_double(res.beam2.squeezing_db())};
      csv.raw_row(cells);
      resolved += res.resolvable ? 1 : 0;
    }
  }
  RunOutput r;
  r.artifacts = {{"capacity_sweep.csv", text.str()}};
  r.summary = std::to_string(resolved) + "/" + std::to_string(xs.size() * regimes.size()) + " points above threshold";
  if (resolved == 0) r.status = kExitUnresolved;
  return r;
}

RunOutput run_psd(const Params &p) {
  const std::string scheme = p.str("scheme");
  MeasurementWindow w{p.num("T"), p.num("Tprime"), p.num("N"), Scheme::Single};
  if (scheme == "consecutive") w.scheme = Scheme::ConsecutiveDifference;
  else if (scheme != "single") throw ValidationError("scheme must be single or consecutive, got '" + scheme + "'");
  if (w.scheme == Scheme::Single && w.T_prime != 0.0) throw ValidationError("Tprime applies to the consecutive scheme only");
  const auto nu = frequency_grid(w, p.num("nu_max_times_T"), p.count("points", 3));
  const auto curve = w.scheme == Scheme::Single ? psd_single(w, nu) : psd_consecutive(w, nu, p.count("phases", 3));
  const auto floor = NoiseFloor::squeezed_db(p.num("squeezing_db"));
  std::ostringstream csv;
  write_psd_csv(csv, curve, floor);
  const auto peak = peak_and_bandwidth(curve);
  json out;
  out["peak_nu_times_T"] = peak.nu_peak * w.T;
  out["peak_signal_normalized"] = peak.value / curve.reference;
  out["fwhm_times_T"] = peak.fwhm * w.T;
  out["reference"] = curve.reference;
  out["noise_variance_factor"] = floor.variance_factor;
  const double lo = std::max(curve.nu.front(), peak.nu_peak - 0.5 * peak.fwhm);
  const double hi = std::min(curve.nu.back(), peak.nu_peak + 0.5 * peak.fwhm);
  out["band_snr_fwhm"] = band_snr(curve, 0.5 * (lo + hi), hi - lo, floor);
  RunOutput r;
  r.artifacts = {{"psd.csv", csv.str()}, {"psd_summary.json", dump(out)}};
  r.summary = "peak at nu T = " + format_double(peak.nu_peak * w.T) + ", FWHM T = " + format_double(peak.fwhm * w.T);
  return r;
}

RunOutput run_channel_sim(const Params &p) {
  RunOutput r;
  r.seed = p.seed();
  const auto b3 = beam3_of(p);
  const auto b2 = beam2_of(p);
  Track track;
  if (!p.str("track").empty()) {
    std::ifstream in(p.str("track"));
    if (!in) throw ValidationError("cannot open track file '" + p.str("track") + "'");
    track = read_track(in);
  } else {
    const LevelCode code(p.count("levels", 1));
    const auto pits = p.count("pits", 1);
    std::mt19937_64 rng(*r.seed);
    std::vector<std::uint8_t> bits(pits * code.bits_per_pit());
    for (auto &b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
    track = bits_to_track(bits, code, p.num("wavelength"));
    std::ostringstream text;
    write_track(text, track);
    r.artifacts.push_back({"track.txt", text.str()});
  }
  ChannelConfig cfg;
  cfg.phi_steps = p.count("phi_steps", 8);
  cfg.noiseless = p.flag("noiseless");
  cfg.integrate_on_grid = p.flag("grid");
  const auto report = channel_sim(track, b3, b2, *r.seed, p.count("trials", 1), cfg);

  std::ostringstream text;
  CsvWriter csv(text);
  const std::string_view cols[] = {"symbols", "undecidable", "symbol_errors", "ser", "ser_ci_low", "ser_ci_high",
                                   "bit_errors", "ber", "ber_ci_low", "ber_ci_high", "snr_per_symbol"};
  csv.header(cols);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto &ber = report.ber;
  const double row[] = {static_cast<double>(report.symbols), static_cast<double>(report.undecidable),
                        static_cast<double>(report.ser.errors), report.ser.rate, report.ser.ci_low, report.ser.ci_high,
                        ber ? static_cast<double>(ber->errors) : nan, ber ? ber->rate : nan,
                        ber ? ber->ci_low : nan, ber ? ber->ci_high : nan, report.snr_per_symbol};
  csv.row(row);
  r.artifacts.push_back({"channel_sim.csv", text.str()});
  r.summary = "SER " + format_double(report.ser.rate) + " (" + std::to_string(report.ser.errors) + "/" +
              std::to_string(report.ser.total) + "), undecidable " + std::to_string(report.undecidable);
  if (report.undecidable == report.symbols) r.status = kExitUnresolved;
  return r;
}

std::vector<Command> commands() {
  auto with = [](std::vector<Param> a, const std::vector<Param> &b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const std::vector<Param> symbol{{"transform", "+u0", "transverse transform: +u0, -u0, +uf0, -uf0"},
                                  {"theta", "0.5", "longitudinal phase in [0, pi), rad"}};
  return {
      {"detect", "split-detector read-out of one symbol plus a phi-scan trace",
       with(with(symbol, beam_params("1", "1")),
            {{"phi", "2.0707963267948966", "reference phase phi, rad"},
             {"grid_points", "4096", "transverse grid samples (even)"},
             {"grid_extent", "8", "grid half-width in waists"},
             {"phi_steps", "64", "phi-scan samples over [0, pi)"},
             {"trials", "0", "shot-noise Monte Carlo trials (0 = none)"},
             {"seed", "", "RNG seed (required when trials > 0)"}}),
       run_detect},
      {"decode", "scan phi and recover the transform and theta of one symbol",
       with(with(symbol, beam_params("1", "1")),
            {{"phi_steps", "64", "phi-scan samples over [0, pi)"},
             {"noise", "false", "add Gaussian shot noise to the scan"},
             {"seed", "", "RNG seed (required when noise = true)"}}),
       run_decode},
      {"snr-sweep", "SNR, delta_theta_min and L_max over one swept parameter",
       with(beam_params("10", "10"), {{"sweep", "beta", "swept parameter: alpha, beta, sq_a_db or sq_b_db"},
                                      {"from", "1", "sweep start"},
                                      {"to", "1000", "sweep end"},
                                      {"points", "50", "sweep points"},
                                      {"spacing", "log", "log or linear"}}),
       run_snr_sweep},
      {"capacity-sweep", "optimal log2 L_max and squeezing versus photon budget",
       {{"n_min", "1", "smallest total photons per bandwidth-time"},
        {"n_max", "100", "largest total photons per bandwidth-time"},
        {"points", "20", "budget points"},
        {"spacing", "log", "log or linear"},
        {"regimes", "all", "comma list of both_coherent, one_squeezed, both_squeezed, or all"}},
       run_capacity_sweep},
      {"psd", "signal and noise power spectral densities",
       {{"scheme", "single", "single or consecutive"},
        {"T", "1", "window length, s"},
        {"Tprime", "0", "delay between consecutive windows, s"},
        {"N", "1", "photon rate, photons/s"},
        {"squeezing_db", "0", "flat noise floor relative to shot noise, dB (negative = squeezed)"},
        {"nu_max_times_T", "4", "upper frequency in units of 1/T"},
        {"points", "4096", "frequency samples"},
        {"phases", "256", "initial-phase samples for the consecutive average"}},
       run_psd},
      {"channel-sim", "end-to-end encode, read out with shot noise and decode a pit track",
       with(beam_params("4", "4"), {{"track", "", "track file; empty = random track from the seed"},
                                    {"levels", "4", "levels per theta for a generated track (power of two)"},
                                    {"pits", "10000", "pits in a generated track"},
                                    {"wavelength", "7.8e-07", "wavelength of a generated track, m"},
                                    {"phi_steps", "32", "phi-scan samples per pit"},
                                    {"trials", "1", "read passes over the track"},
                                    {"noiseless", "false", "disable shot noise"},
                                    {"grid", "false", "integrate segments on the transverse grid"},
                                    {"seed", "", "RNG seed (required)"}}),
       run_channel_sim},
  };
}

// ---- config, output and manifest plumbing ----

std::map<std::string, std::string> read_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> values;
  std::string line;
  int number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    values[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
  }
  return values;
}

fs::path output_dir(const std::string &flag) {
  if (!flag.empty()) return flag;
  if (const char *env = std::getenv("PHASECODE_OUT_DIR"); env && *env) return env;
  return ".";
}

std::string manifest_text(const Command &cmd, const Params &params, const RunOutput &out) {
  json m;
  m["tool"] = "phasecode";
  m["version"] = PHASECODE_VERSION;
  m["command"] = cmd.name;
  m["config"] = params.all();
  m["seed"] = out.seed ? json(*out.seed) : json(nullptr);
  json files = json::array();
  for (const auto &a : out.artifacts) files.push_back(a.filename);
  m["outputs"] = files;
  return dump(m);
}

void write_outputs(const fs::path &dir, const std::vector<Artifact> &artifacts) {
  std::vector<fs::path> written;
  try {
    fs::create_directories(dir);
    for (const auto &a : artifacts) {
      const fs::path path = dir / a.filename;
      std::ofstream f(path, std::ios::binary);
      written.push_back(path);
      f << a.content;
      if (!f.flush()) throw std::runtime_error("write failed: " + path.string());
    }
  } catch (...) {
    std::error_code ec;
    for (const auto &path : written) fs::remove(path, ec);
    throw;
  }
}

int execute(const Command &cmd, const std::map<std::string, std::string> &file_values,
            const std::map<std::string, std::string> &flag_values, const std::string &out_flag) {
  std::map<std::string, std::string> resolved;
  for (const auto &p : cmd.params) resolved[p.name] = p.fallback;
  for (const auto &[k, v] : file_values) {
    if (!resolved.contains(k)) throw ValidationError("unknown key '" + k + "' for command " + cmd.name);
    resolved[k] = v;
  }
  for (const auto &[k, v] : flag_values) resolved[k] = v;
  const Params params(resolved);
  RunOutput out = cmd.run(params);
  out.artifacts.push_back({"manifest.json", manifest_text(cmd, params, out)});
  const fs::path dir = output_dir(out_flag);
  write_outputs(dir, out.artifacts);
  std::cout << cmd.name << ": " << out.summary << " -> " << dir.string() << '\n';
  return out.status;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"phasecode: transverse phase-front coding read-out and capacity tools"};
  app.set_version_flag("--version", std::string(PHASECODE_VERSION));
  app.require_subcommand(1);

  const auto cmds = commands();
  std::string config_path, out_flag, manifest_path;
  std::vector<std::map<std::string, std::string>> raw(cmds.size());
  std::vector<std::vector<std::pair<std::string, CLI::Option *>>> opts(cmds.size());
  std::vector<CLI::App *> subs;
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    auto *sub = app.add_subcommand(cmds[i].name, cmds[i].help);
    sub->add_option("--config", config_path, "key = value config file; flags override it");
    sub->add_option("--out", out_flag, "output directory (default $PHASECODE_OUT_DIR, else .)");
    for (const auto &p : cmds[i].params) {
      auto *o = sub->add_option("--" + p.name, raw[i][p.name],
                                p.help + (p.fallback.empty() ? "" : " [" + p.fallback + "]"));
      opts[i].emplace_back(p.name, o);
    }
    subs.push_back(sub);
  }
  auto *replay = app.add_subcommand("replay", "re-run a command from its manifest.json");
  replay->add_option("manifest", manifest_path, "manifest.json written by an earlier run")->required();
  replay->add_option("--out", out_flag, "output directory (default $PHASECODE_OUT_DIR, else .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (replay->parsed()) {
      std::ifstream in(manifest_path);
      if (!in) throw ValidationError("cannot open manifest '" + manifest_path + "'");
      json m;
      try {
        m = json::parse(in);
      } catch (const json::exception &e) {
        throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
      }
      if (!m.is_object() || m.value("tool", "") != "phasecode" || !m.contains("command") || !m.contains("config")) {
        throw ValidationError("not a phasecode manifest: '" + manifest_path + "'");
      }
      const auto name = m["command"].get<std::string>();
      for (const auto &cmd : cmds) {
        if (cmd.name == name) return execute(cmd, m["config"].get<std::map<std::string, std::string>>(), {}, out_flag);
      }
      throw ValidationError("manifest names unknown command '" + name + "'");
    }
    for (std::size_t i = 0; i < cmds.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      std::map<std::string, std::string> flags;
      for (const auto &[name, o] : opts[i]) {
        if (o->count() > 0) flags[name] = raw[i][name];
      }
      const auto file = config_path.empty() ? std::map<std::string, std::string>{} : read_config_file(config_path);
      return execute(cmds[i], file, flags, out_flag);
    }
  } catch (const ValidationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
