#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phasecode/capacity.hpp"
#include "phasecode/channel.hpp"
#include "phasecode/detection.hpp"
#include "phasecode/errors.hpp"
#include "phasecode/noise.hpp"
#include "phasecode/spectral.hpp"

namespace py = pybind11;
using namespace phasecode;
using namespace pybind11::literals;

namespace {

py::dict combos_dict(const SignalTerms &t) { return py::dict("a"_a = t.a, "b"_a = t.b, "c"_a = t.c, "d"_a = t.d); }

py::dict detection_dict(const DetectionResult &r) {
  return py::dict("segments"_a = r.segments, "combos"_a = combos_dict(r.combos), "noise_var_c"_a = r.noise_var_c,
                  "noise_var_d"_a = r.noise_var_d);
}

py::dict curve_dict(const PsdCurve &c) {
  return py::dict("nu"_a = c.nu, "signal"_a = c.signal, "noise"_a = c.noise, "reference"_a = c.reference);
}

py::dict rate_dict(const ErrorRate &e) {
  return py::dict("errors"_a = e.errors, "total"_a = e.total, "rate"_a = e.rate, "ci_low"_a = e.ci_low,
                  "ci_high"_a = e.ci_high);
}

} // namespace

PYBIND11_MODULE(_phasecode, m) {
  m.doc() = "Split-detector phase-front coding: read-out, noise limits, capacity and spectra.";
  m.attr("__version__") = PHASECODE_VERSION;
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::enum_<Transform>(m, "Transform")
      .value("PLUS_U0", Transform::PlusU0)
      .value("MINUS_U0", Transform::MinusU0)
      .value("PLUS_UF0", Transform::PlusUf0)
      .value("MINUS_UF0", Transform::MinusUf0);
  m.def("parse_transform", &parse_transform, "text"_a);

  py::class_<PhaseSymbol>(m, "PhaseSymbol")
      .def(py::init<Transform, double>(), "transform"_a, "theta"_a)
      .def_property_readonly("transform", &PhaseSymbol::transform)
      .def_property_readonly("theta", &PhaseSymbol::theta)
      .def("__repr__", [](const PhaseSymbol &s) {
        return "PhaseSymbol(" + std::string(to_string(s.transform())) + ", " + std::to_string(s.theta()) + ")";
      });

  py::class_<BeamState>(m, "BeamState")
      .def(py::init<double, double, double, double>(), "amplitude"_a, "phase"_a = 0.0, "var_plus"_a = 1.0,
           "var_minus"_a = 1.0)
      .def_static("squeezed_db", &BeamState::squeezed_db, "amplitude"_a, "squeezing_db"_a, "phase"_a = 0.0)
      .def_property_readonly("amplitude", &BeamState::amplitude)
      .def_property_readonly("phase", &BeamState::phase)
      .def_property_readonly("var_plus", &BeamState::var_plus)
      .def_property_readonly("var_minus", &BeamState::var_minus);

  m.def("table_signals", [](const PhaseSymbol &s, const BeamState &b3, const BeamState &b2) {
    return combos_dict(table_signals(s, b3, b2));
  }, "symbol"_a, "beam3"_a, "beam2"_a);
  m.def("simulate_detection", [](const PhaseSymbol &s, const BeamState &b3, const BeamState &b2, double extent,
                                 std::size_t points) {
    return detection_dict(simulate_detection(s, b3, b2, SpatialGrid(extent, points)));
  }, "symbol"_a, "beam3"_a, "beam2"_a, "grid_extent"_a = SpatialGrid::kDefaultExtent,
        "grid_points"_a = SpatialGrid::kDefaultPoints);
  m.def("sample_shot_noise", [](const PhaseSymbol &s, const BeamState &b3, const BeamState &b2, std::uint64_t seed,
                                std::uint64_t trials) {
    const auto st = sample_shot_noise(analytic_detection(s, b3, b2), seed, trials);
    return py::dict("mean_c"_a = st.c.mean, "var_c"_a = st.c.variance(), "mean_d"_a = st.d.mean,
                    "var_d"_a = st.d.variance());
  }, "symbol"_a, "beam3"_a, "beam2"_a, "seed"_a, "trials"_a);
  m.def("decode", [](const PhaseSymbol &s, const BeamState &b3, const BeamState &b2, std::size_t steps) {
    const auto d = decode(table_readout(s, b3, b2), steps);
    return py::dict("decided"_a = d.decided, "symbol"_a = d.symbol, "phi_opt"_a = d.phi_opt,
                    "confidence"_a = d.confidence);
  }, "symbol"_a, "beam3"_a, "beam2"_a, "phi_steps"_a = 64);

  m.def("snr", &snr, "beam3"_a, "beam2"_a, "phi_minus_theta"_a);
  m.def("delta_theta_min", py::overload_cast<const BeamState &, const BeamState &>(&delta_theta_min), "beam3"_a,
        "beam2"_a);
  m.def("homodyne_delta_theta_min", &homodyne_delta_theta_min, "alpha"_a, "var_a"_a = 1.0);
  m.def("l_max", &l_max, "beam3"_a, "beam2"_a);
  m.def("photons_per_window", &photons_per_window, "power_w"_a, "wavelength_m"_a, "window_s"_a);

  m.def("optimize_capacity", [](double n_bar, const std::string &regime) {
    const auto r = optimize_capacity({n_bar, parse_capacity_regime(regime)});
    return py::dict("resolvable"_a = r.resolvable, "log2_levels"_a = r.log2_levels,
                    "delta_theta_min"_a = r.delta_theta_min, "split"_a = r.split, "alpha"_a = r.beam1.alpha,
                    "beta"_a = r.beam2.alpha, "squeezing_db_beam1"_a = r.beam1.squeezing_db(),
                    "squeezing_db_beam2"_a = r.beam2.squeezing_db(),
                    "improvement_vs_coherent"_a = r.improvement_vs_coherent);
  }, "n_bar"_a, "regime"_a = "both_coherent");

  m.def("psd", [](const std::string &scheme, double T, double T_prime, double N, double nu_max_times_T,
                  std::size_t points) {
    MeasurementWindow w{T, T_prime, N, scheme == "consecutive" ? Scheme::ConsecutiveDifference : Scheme::Single};
    if (scheme != "single" && scheme != "consecutive") throw ValidationError("scheme must be single or consecutive");
    const auto nu = frequency_grid(w, nu_max_times_T, points);
    return curve_dict(w.scheme == Scheme::Single ? psd_single(w, nu) : psd_consecutive(w, nu));
  }, "scheme"_a = "single", "T"_a = 1.0, "T_prime"_a = 0.0, "N"_a = 1.0, "nu_max_times_T"_a = 4.0,
        "points"_a = 4096);
  m.def("consecutive_peak_x", &consecutive_peak_x);

  m.def("channel_sim", [](const std::vector<std::uint8_t> &bits, std::size_t levels, const BeamState &b3,
                          const BeamState &b2, std::uint64_t seed, std::uint64_t trials, std::size_t phi_steps,
                          bool noiseless) {
    const auto track = bits_to_track(bits, LevelCode(levels), 780e-9);
    ChannelConfig cfg;
    cfg.phi_steps = phi_steps;
    cfg.noiseless = noiseless;
    const auto r = channel_sim(track, b3, b2, seed, trials, cfg);
    return py::dict("symbols"_a = r.symbols, "undecidable"_a = r.undecidable, "ser"_a = rate_dict(r.ser),
                    "snr_per_symbol"_a = r.snr_per_symbol);
  }, "bits"_a, "levels_per_theta"_a, "beam3"_a, "beam2"_a, "seed"_a, "trials"_a = 1, "phi_steps"_a = 32,
        "noiseless"_a = false);
}
