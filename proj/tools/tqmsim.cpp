// tqmsim: batch driver for the chain, memory-gate, transfer, and budget
// studies. Every subcommand reads an optional JSON config (deep-merged over
// built-in defaults), writes its artifacts plus a manifest.json echoing the
// fully resolved config, and exits 0 only when all requested verifications
// pass (1 on verification failure, 2 on config errors).

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tqm/budget.hpp"
#include "tqm/errors.hpp"
#include "tqm/gates.hpp"
#include "tqm/lattice.hpp"
#include "tqm/rng.hpp"
#include "tqm/space.hpp"
#include "tqm/state.hpp"
#include "tqm/textio.hpp"
#include "tqm/transfer.hpp"
#include "tqm/types.hpp"
#include "tqm/wannier.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using tqm::CsvWriter;
using tqm::fmt_double;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  bool linear_frequency = false;
  double dt = 0.0;    // > 0 overrides the config "dt" where the subcommand has one
  int samples = 0;    // > 0 overrides the config "n_samples"
};

struct RunResult {
  int code = 0;
  std::vector<std::string> outputs;
};

// ---------------------------------------------------------------- config ---

ordered_json load_user_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return ordered_json::parse(in);
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

std::string type_name(const ordered_json& v) {
  if (v.is_number()) return "number";
  return v.type_name();
}

// User keys must exist in the defaults with matching types; objects merge
// recursively, everything else (including arrays) replaces the default.
void merge_into(ordered_json& base, const ordered_json& user, const std::string& prefix) {
  if (!user.is_object()) throw ConfigError("config root must be a JSON object");
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    auto it = base.find(key);
    if (it == base.end()) throw ConfigError("unknown config field '" + path + "'");
    if (it->is_object()) {
      if (!value.is_object())
        throw ConfigError("config field '" + path + "' expects an object, got " + type_name(value));
      merge_into(*it, value, path);
    } else if (it->is_array()) {
      if (!value.is_array())
        throw ConfigError("config field '" + path + "' expects an array, got " + type_name(value));
      *it = value;
    } else if (it->is_number()) {
      if (!value.is_number())
        throw ConfigError("config field '" + path + "' expects a number, got " + type_name(value));
      *it = value;
    } else if (it->is_boolean()) {
      if (!value.is_boolean())
        throw ConfigError("config field '" + path + "' expects a boolean, got " + type_name(value));
      *it = value;
    } else if (it->is_string()) {
      if (!value.is_string())
        throw ConfigError("config field '" + path + "' expects a string, got " + type_name(value));
      *it = value;
    } else {
      *it = value;
    }
  }
}

ordered_json resolve_config(const ordered_json& defaults, const CommonOpts& opts) {
  ordered_json cfg = defaults;
  if (!opts.config_path.empty()) merge_into(cfg, load_user_config(opts.config_path), "");
  if (opts.dt > 0.0 && cfg.contains("dt")) cfg["dt"] = opts.dt;
  if (opts.samples > 0 && cfg.contains("n_samples")) cfg["n_samples"] = opts.samples;
  return cfg;
}

// Multiplies the named (possibly dotted) numeric fields by 2*pi, converting a
// config written in ordinary (cycles-per-time) frequencies to the angular
// convention the library uses internally.
void apply_linear_frequency(ordered_json& cfg, const std::vector<std::string>& keys) {
  for (const std::string& path : keys) {
    ordered_json* node = &cfg;
    size_t start = 0;
    while (true) {
      size_t dot = path.find('.', start);
      std::string part = path.substr(start, dot == std::string::npos ? dot : dot - start);
      node = &node->at(part);
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    *node = node->get<double>() * 2.0 * tqm::kPi;
  }
}

double jd(const ordered_json& cfg, const char* key) { return cfg.at(key).get<double>(); }
int ji(const ordered_json& cfg, const char* key) { return cfg.at(key).get<int>(); }
bool jb(const ordered_json& cfg, const char* key) { return cfg.at(key).get<bool>(); }

tqm::cxd jcx(const ordered_json& v, const char* what) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(std::string(what) + " expects [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const CommonOpts& opts,
                    const ordered_json& config, const std::vector<std::string>& outputs) {
  ordered_json m;
  m["tool"] = "tqmsim";
  m["tool_version"] = kToolVersion;
  m["format_version"] = 1;
  m["subcommand"] = subcommand;
  m["invocation"] = {{"seed", opts.seed},
                     {"linear_frequency", opts.linear_frequency},
                     {"dt_override", opts.dt},
                     {"samples_override", opts.samples}};
  m["config"] = config;
  m["outputs"] = outputs;
  write_json(dir / "manifest.json", m);
}

// ---------------------------------------------------------- lattice runs ---

std::vector<double> grid_points(const ordered_json& g, const std::string& name) {
  const double lo = jd(g, "min");
  const double hi = jd(g, "max");
  const int count = ji(g, "count");
  if (count < 1) throw ConfigError(name + ".count must be >= 1");
  std::vector<double> pts(count);
  for (int i = 0; i < count; ++i)
    pts[i] = count == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(count - 1);
  return pts;
}

RunResult run_phase_diagram(const ordered_json& cfg, const CommonOpts&, const fs::path& dir) {
  const auto gz = grid_points(cfg.at("gamma_z"), "gamma_z");
  const auto tso = grid_points(cfg.at("t_so"), "t_so");
  const int n_k = ji(cfg, "n_k");
  CsvWriter csv(dir / "phase_diagram.csv", {"gamma_z", "t_so", "winding", "gap"});
  for (double g : gz) {
    for (double t : tso) {
      tqm::lattice::LatticeParams p;
      p.t_s = jd(cfg, "t_s");
      p.t_so = t;
      p.gamma_z = g;
      std::string winding;
      try {
        winding = CsvWriter::cell(tqm::lattice::winding_number(p, n_k));
      } catch (const tqm::GapClosedError&) {
        winding = "gap_closed";
      }
      csv.row({CsvWriter::cell(g), CsvWriter::cell(t), winding,
               CsvWriter::cell(tqm::lattice::bulk_gap(p))});
    }
  }
  return {0, {"phase_diagram.csv"}};
}

RunResult run_edge_modes(const ordered_json& cfg, const CommonOpts&, const fs::path& dir) {
  CsvWriter csv(dir / "edge_modes.csv", {"n_sites", "splitting", "localization_length"});
  for (const auto& nj : cfg.at("n_list")) {
    const int n = nj.get<int>();
    tqm::lattice::LatticeParams p;
    p.t_s = jd(cfg, "t_s");
    p.t_so = jd(cfg, "t_so");
    p.gamma_z = jd(cfg, "gamma_z");
    p.n_sites = n;
    try {
      const auto pair = tqm::lattice::zero_modes(p);
      const double loc = std::max(pair.localization_lengths[0], pair.localization_lengths[1]);
      csv.row({CsvWriter::cell(n), CsvWriter::cell(pair.splitting), CsvWriter::cell(loc)});
    } catch (const tqm::NotTopologicalError&) {
      csv.row({CsvWriter::cell(n), "NotTopological", ""});
    }
  }
  return {0, {"edge_modes.csv"}};
}

double mean_site(const tqm::StateVector& psi) {
  const auto& a = psi.amplitudes();
  double mean = 0.0;
  for (int x = 0; 2 * x + 1 < a.size(); ++x)
    mean += x * (std::norm(a(2 * x)) + std::norm(a(2 * x + 1)));
  return mean;
}

RunResult run_domain(const ordered_json& cfg, const CommonOpts&, const fs::path& dir) {
  tqm::lattice::LatticeParams p;
  p.t_s = jd(cfg, "t_s");
  p.t_so = jd(cfg, "t_so");
  p.gamma_z = jd(cfg, "gamma_z");
  p.n_sites = ji(cfg, "n_sites");

  tqm::lattice::DomainField field;
  field.gamma_0 = jd(cfg, "gamma_0");
  const std::string axis = cfg.at("axis").get<std::string>();
  if (axis == "y")
    field.axis = tqm::lattice::DomainAxis::y;
  else if (axis == "z")
    field.axis = tqm::lattice::DomainAxis::z;
  else
    throw ConfigError("axis must be \"y\" or \"z\"");
  field.x1 = ji(cfg, "x1");
  field.x2 = ji(cfg, "x2");

  const auto pair = tqm::lattice::midgap_states(p, field);
  const double gap = tqm::lattice::bulk_gap(p);

  ordered_json summary;
  summary["energies"] = {pair.energies[0], pair.energies[1]};
  summary["splitting"] = pair.splitting;
  summary["localization_lengths"] = {pair.localization_lengths[0], pair.localization_lengths[1]};
  summary["wall_positions"] = {mean_site(pair.states[0]), mean_site(pair.states[1])};
  summary["bulk_gap"] = gap;
  summary["inside_gap"] =
      std::max(std::abs(pair.energies[0]), std::abs(pair.energies[1])) < 0.5 * gap;

  std::vector<std::string> outputs = {"domain_summary.json"};
  int code = 0;

  const auto& ramp_cfg = cfg.at("ramp");
  if (!ramp_cfg.empty()) {
    std::vector<tqm::lattice::RampPoint> ramp;
    for (const auto& pt : ramp_cfg) {
      if (!pt.is_object() || !pt.contains("t") || !pt.contains("gamma_0"))
        throw ConfigError("ramp entries expect {\"t\": ..., \"gamma_0\": ...}");
      ramp.push_back({pt.at("t").get<double>(), pt.at("gamma_0").get<double>()});
    }
    try {
      const auto traj = tqm::lattice::tsq_rotation(p, field, ramp, jd(cfg, "dt"),
                                                   ji(cfg, "n_samples"), jd(cfg, "leakage_limit"));
      CsvWriter csv(dir / "trajectory.csv",
                    {"t", "gamma_0", "bx", "by", "bz", "leakage", "splitting"});
      double max_leak = 0.0;
      for (const auto& s : traj) {
        max_leak = std::max(max_leak, s.leakage);
        csv.row({CsvWriter::cell(s.t), CsvWriter::cell(s.gamma_0), CsvWriter::cell(s.bx),
                 CsvWriter::cell(s.by), CsvWriter::cell(s.bz), CsvWriter::cell(s.leakage),
                 CsvWriter::cell(s.splitting)});
      }
      const auto& last = traj.back();
      summary["trajectory"] = {{"n_samples", static_cast<int>(traj.size())},
                               {"max_leakage", max_leak},
                               {"final_bloch", {last.bx, last.by, last.bz}}};
      outputs.insert(outputs.begin(), "trajectory.csv");
    } catch (const tqm::LeakageExceededError& e) {
      summary["trajectory_error"] = e.what();
      code = 1;
    }
  }

  write_json(dir / "domain_summary.json", summary);
  return {code, outputs};
}

// ----------------------------------------------------------- memory gate ---

ordered_json check_entry(const std::string& name, double distance, double tol) {
  ordered_json c;
  c["name"] = name;
  c["distance"] = distance;
  c["tolerance"] = tol;
  c["pass"] = distance <= tol;
  return c;
}

RunResult run_memory_verify(const ordered_json& cfg, const CommonOpts& opts, const fs::path& dir) {
  const int n_spins = ji(cfg, "n_spins");
  if (n_spins < 1 || n_spins > 6)
    throw ConfigError("n_spins must be in [1, 6]; the brute-force checks grow exponentially");
  const int n_trials = ji(cfg, "n_trials");
  if (n_trials < 1) throw ConfigError("n_trials must be >= 1");

  tqm::gates::QndParams qnd;
  qnd.g = jd(cfg.at("qnd"), "g");
  qnd.delta = jd(cfg.at("qnd"), "delta");
  tqm::gates::AncillaParams anc;
  anc.g_prime = jd(cfg.at("ancilla"), "g_prime");
  anc.omega_a = jd(cfg.at("ancilla"), "omega_a");
  anc.delta_prime = jd(cfg.at("ancilla"), "delta_prime");

  tqm::gates::SelectionMask mask;
  mask.participating.assign(static_cast<size_t>(n_spins), true);
  mask.residual = jd(cfg, "residual");

  ordered_json report;
  report["n_spins"] = n_spins;
  report["seed"] = opts.seed;
  ordered_json checks = ordered_json::array();

  {
    double dist = 0.0;
    for (int n_c : {0, 1}) {
      const tqm::Matrix brute = tqm::gates::qnd_unitary_brute_force(qnd, mask, n_c);
      const tqm::Matrix closed = tqm::gates::qnd_unitary_closed_form(n_spins, n_c);
      dist = std::max(dist, tqm::operator_norm(brute - closed));
    }
    checks.push_back(check_entry("photon_conditioned_string", dist, 1e-10));
  }

  const int n_seq = std::min(n_spins, 4);
  tqm::gates::SelectionMask seq_mask;
  seq_mask.participating.assign(static_cast<size_t>(n_seq), true);
  seq_mask.residual = mask.residual;
  report["n_sequence_spins"] = n_seq;

  {
    ordered_json c;
    try {
      const auto r = tqm::gates::ancilla_sequence(qnd, anc, seq_mask,
                                                  jd(cfg, "transfer_time_factor"),
                                                  jd(cfg, "corrupt_phase_offset"));
      c = check_entry("ancilla_controlled_string", r.distance_to_target, 1e-8);
      c["unitarity_error"] = r.unitarity_error;
      c["transfer_time"] = r.transfer_time;
      c["phase_angle"] = r.phase_angle;
    } catch (const tqm::CavityLeakError& e) {
      c["name"] = "ancilla_controlled_string";
      c["distance"] = -1.0;
      c["tolerance"] = 1e-8;
      c["pass"] = false;
      c["error"] = e.what();
    }
    checks.push_back(c);
  }

  {
    // Negative control: the full Raman period returns the excitation to the
    // ancilla, so the sequence must land a fixed distance from the target.
    ordered_json c;
    try {
      const auto r = tqm::gates::ancilla_sequence(qnd, anc, seq_mask, 2.0, 0.0);
      const double expected = std::sqrt(2.0);
      c = check_entry("full_period_return", std::abs(r.distance_to_target - expected), 1e-6);
      c["raw_distance"] = r.distance_to_target;
      c["expected_distance"] = expected;
    } catch (const tqm::CavityLeakError& e) {
      c["name"] = "full_period_return";
      c["distance"] = -1.0;
      c["tolerance"] = 1e-6;
      c["pass"] = false;
      c["error"] = e.what();
    }
    checks.push_back(c);
  }

  {
    // Write/read walk on an abstract two-level memory: the composed walk must
    // invert exactly and the write must place (alpha, beta) on the logical pair.
    tqm::CompositeSpace logical({{"logical", 2}});
    tqm::Vector plus(2), minus(2);
    plus << tqm::kInvSqrt2, tqm::kInvSqrt2;
    minus << tqm::kInvSqrt2, -tqm::kInvSqrt2;
    tqm::gates::LogicalTsq tsq{tqm::StateVector(logical, plus), tqm::StateVector(logical, minus)};

    const tqm::Matrix u_in = tqm::gates::swap_in_unitary(tsq);
    const tqm::Matrix u_out = tqm::gates::swap_out_unitary(tsq);
    const double defect =
        tqm::operator_norm(tqm::Matrix(u_out * u_in) - tqm::Matrix::Identity(4, 4));

    tqm::CounterRng rng(opts.seed);
    double worst_round = 0.0, worst_map = 0.0;
    for (int i = 0; i < n_trials; ++i) {
      const auto q = rng.qubit(0, static_cast<std::uint64_t>(i));
      const tqm::StateVector written = tqm::gates::swap_in(q[0], q[1], tsq);
      tqm::Vector target(4);
      target << q[0], q[1], 0.0, 0.0;
      worst_map = std::max(worst_map, (written.amplitudes() - target).norm());
      tqm::Vector back = u_out * written.amplitudes();
      tqm::Vector stored(4);
      stored << q[0], 0.0, q[1], 0.0;
      worst_round = std::max(worst_round, (back - stored).norm());
    }
    auto c1 = check_entry("swap_roundtrip", std::max(defect, worst_round), 1e-12);
    c1["matrix_defect"] = defect;
    c1["n_trials"] = n_trials;
    checks.push_back(c1);
    checks.push_back(check_entry("swap_in_mapping", worst_map, 1e-12));
  }

  bool all_pass = true;
  for (const auto& c : checks) all_pass = all_pass && c.at("pass").get<bool>();
  report["checks"] = checks;
  report["all_pass"] = all_pass;
  write_json(dir / "verify_report.json", report);
  return {all_pass ? 0 : 1, {"verify_report.json"}};
}

// -------------------------------------------------------------- transfer ---

tqm::TransferParams transfer_params(const ordered_json& cfg) {
  const int k = ji(cfg, "k_order");
  if (k < 1) throw ConfigError("k_order must be >= 1");
  return tqm::resonance_coupling(k, jd(cfg, "g"));
}

tqm::DecayRates decay_rates(const ordered_json& cfg) {
  const auto& r = cfg.at("rates");
  return {jd(r, "kappa_a"), jd(r, "kappa_b"), jd(r, "kappa_d"), jd(r, "gamma_a"),
          jd(r, "gamma_s")};
}

tqm::TransferScenario transfer_scenario(const ordered_json& cfg) {
  tqm::TransferScenario s;
  s.alpha = jcx(cfg.at("alpha"), "alpha");
  s.beta = jcx(cfg.at("beta"), "beta");
  s.t_final = jd(cfg, "t_final");
  s.n_samples = ji(cfg, "n_samples");
  return s;
}

RunResult run_transfer(const ordered_json& cfg, const CommonOpts&, const fs::path& dir) {
  const auto params = transfer_params(cfg);
  const auto rates = decay_rates(cfg);
  const auto scenario = transfer_scenario(cfg);
  const double dt = jd(cfg, "dt");

  const auto curve = tqm::lindblad_transfer(params, rates, scenario, dt);

  CsvWriter csv(dir / "transfer_curve.csv", {"t", "pi_g_t", "f2", "excitation"});
  for (const auto& pt : curve.points)
    csv.row({CsvWriter::cell(pt.t), CsvWriter::cell(tqm::kPi * params.g * pt.t),
             CsvWriter::cell(pt.f2), CsvWriter::cell(pt.excitation)});

  ordered_json summary;
  summary["g"] = params.g;
  summary["k_order"] = ji(cfg, "k_order");
  summary["r"] = params.r();
  summary["dt_used"] = curve.dt;
  summary["peak_f2"] = curve.peak_f2;
  summary["peak_time"] = curve.peak_time;
  summary["pi_g_peak_time"] = tqm::kPi * params.g * curve.peak_time;
  summary["f2_initial"] = curve.points.front().f2;
  summary["excitation_initial"] = curve.points.front().excitation;
  summary["excitation_final"] = curve.points.back().excitation;
  summary["peak_above_0p95"] = curve.peak_f2 > 0.95;
  summary["convention"] = "config frequencies are angular; --linear-frequency rescales them";

  if (jb(cfg, "compare_rates_scaled_reading")) {
    // Alternative reading of the same numbers: decay rates taken as ordinary
    // frequencies (scaled by 2*pi) while the coupling stays as printed. Kept
    // as a recorded comparison because the two conventions differ physically.
    tqm::DecayRates alt = rates;
    const double two_pi = 2.0 * tqm::kPi;
    alt.kappa_a *= two_pi;
    alt.kappa_b *= two_pi;
    alt.kappa_d *= two_pi;
    alt.gamma_a *= two_pi;
    alt.gamma_s *= two_pi;
    const auto alt_curve = tqm::lindblad_transfer(params, alt, scenario, dt);
    summary["rates_scaled_reading"] = {
        {"description", "decay rates times 2*pi, coupling as printed"},
        {"peak_f2", alt_curve.peak_f2},
        {"peak_time", alt_curve.peak_time}};
  }

  write_json(dir / "transfer_summary.json", summary);
  return {0, {"transfer_curve.csv", "transfer_summary.json"}};
}

RunResult run_mismatch(const ordered_json& cfg, const CommonOpts&, const fs::path& dir) {
  const auto params = transfer_params(cfg);
  const auto rates = decay_rates(cfg);
  const auto scenario = transfer_scenario(cfg);
  std::vector<double> fractions;
  for (const auto& f : cfg.at("fractions")) fractions.push_back(f.get<double>());

  const auto table = tqm::mismatch_sweep(params, rates, scenario, fractions,
                                                   jd(cfg, "dt"));
  CsvWriter csv(dir / "mismatch.csv", {"fraction", "peak_f2"});
  double min_peak = 1.0, max_peak = 0.0, worst = 0.0;
  for (const auto& pt : table) {
    csv.row({CsvWriter::cell(pt.fraction), CsvWriter::cell(pt.peak_f2)});
    if (pt.peak_f2 < min_peak) {
      min_peak = pt.peak_f2;
      worst = pt.fraction;
    }
    max_peak = std::max(max_peak, pt.peak_f2);
  }

  ordered_json summary;
  summary["min_peak_f2"] = min_peak;
  summary["max_peak_f2"] = max_peak;
  summary["worst_fraction"] = worst;
  write_json(dir / "mismatch_summary.json", summary);
  return {0, {"mismatch.csv", "mismatch_summary.json"}};
}

RunResult run_large_r(const ordered_json& cfg, const CommonOpts&, const fs::path& dir) {
  const auto rates = decay_rates(cfg);
  const auto scenario = transfer_scenario(cfg);
  std::vector<int> k_list;
  for (const auto& k : cfg.at("k_list")) k_list.push_back(k.get<int>());

  const auto study = tqm::large_r_study(jd(cfg, "g"), k_list, rates, scenario,
                                                  jd(cfg, "dt"));
  CsvWriter csv(dir / "large_r.csv", {"k", "r", "peak_f2", "peak_f2_no_mech_decay", "gap"});
  bool monotone = true;
  for (size_t i = 0; i < study.size(); ++i) {
    const auto& pt = study[i];
    csv.row({CsvWriter::cell(pt.k_order), CsvWriter::cell(pt.r), CsvWriter::cell(pt.peak_f2),
             CsvWriter::cell(pt.peak_f2_no_mech_decay), CsvWriter::cell(pt.gap)});
    if (i > 0 && !(pt.gap < study[i - 1].gap)) monotone = false;
  }

  ordered_json summary;
  summary["gap_monotone_decreasing"] = monotone;
  write_json(dir / "large_r_summary.json", summary);
  return {0, {"large_r.csv", "large_r_summary.json"}};
}

// ---------------------------------------------------------------- budget ---

RunResult run_budget(const ordered_json& cfg, const CommonOpts&, const fs::path& dir) {
  tqm::BudgetInputs in;
  in.n_atoms = ji(cfg, "n_atoms");
  in.g = jd(cfg, "g");
  in.gamma = jd(cfg, "gamma");
  in.kappa = jd(cfg, "kappa");
  in.delta = jd(cfg, "delta");
  in.omega_a = jd(cfg, "omega_a");
  in.delta_prime = jd(cfg, "delta_prime");
  in.epsilon_addr = jd(cfg, "epsilon_addr");
  in.p_interface = jd(cfg, "p_interface");
  in.addressed_sites = ji(cfg, "addressed_sites");

  const auto rep = tqm::compose_budget(in, jd(cfg, "f2"), jd(cfg, "quoted_f_cs"),
                                               jd(cfg, "loss_figure"));

  ordered_json j;
  j["purcell_p"] = rep.purcell_p;
  j["gamma_eff"] = rep.gamma_eff;
  j["tau"] = rep.tau;
  j["delta_star"] = rep.delta_star;
  j["p_loss_at_delta"] = rep.p_loss_at_delta;
  j["p_loss_min"] = rep.p_loss_min;
  j["f_cs"] = rep.f_cs;
  j["f_cs_derived"] = rep.f_cs_derived;
  j["f1"] = rep.f1;
  j["f1_derived"] = rep.f1_derived;
  j["f2"] = rep.f2;
  j["f_total"] = rep.f_total;
  j["f_total_derived"] = rep.f_total_derived;
  j["shift_ratio"] = rep.shift_ratio;
  j["notes"] = rep.notes;
  write_json(dir / "budget_report.json", j);

  std::ofstream audit(dir / "budget_audit.txt");
  audit << "inputs: N = " << in.n_atoms << ", g = " << fmt_double(in.g)
        << ", gamma = " << fmt_double(in.gamma) << ", kappa = " << fmt_double(in.kappa)
        << ", delta = " << fmt_double(in.delta) << ", delta' = " << fmt_double(in.delta_prime)
        << "\n";
  audit << "cooperativity P = g^2/(kappa gamma) = " << fmt_double(rep.purcell_p) << "\n";
  audit << "optimal detuning delta* = g sqrt(N gamma / kappa) = " << fmt_double(rep.delta_star)
        << "\n";
  audit << "effective decay gamma_eff = gamma g^2/delta^2 = " << fmt_double(rep.gamma_eff)
        << "\n";
  audit << "interaction time tau = pi delta / g^2 = " << fmt_double(rep.tau) << "\n";
  audit << "photon loss at delta used = " << fmt_double(rep.p_loss_at_delta) << "\n";
  audit << "photon loss minimum 2 pi sqrt(N/P) = " << fmt_double(rep.p_loss_min) << "\n";
  audit << "controlled-operation fidelity: quoted = " << fmt_double(rep.f_cs)
        << ", derived = " << fmt_double(rep.f_cs_derived) << "\n";
  audit << "memory fidelity F1 = f_cs^2: quoted = " << fmt_double(rep.f1)
        << ", derived = " << fmt_double(rep.f1_derived) << "\n";
  audit << "transfer fidelity F2 = " << fmt_double(rep.f2) << "\n";
  audit << "total F = F1 F2: quoted = " << fmt_double(rep.f_total)
        << ", derived = " << fmt_double(rep.f_total_derived) << "\n";
  audit << "lattice shift ratio (N g^2/delta)/delta' = " << fmt_double(rep.shift_ratio) << "\n";
  for (const auto& note : rep.notes) audit << "note: " << note << "\n";

  return {0, {"budget_report.json", "budget_audit.txt"}};
}

// --------------------------------------------------------------- hopping ---

RunResult run_hopping(const ordered_json& cfg, const CommonOpts&, const fs::path& dir) {
  CsvWriter csv(dir / "hopping.csv", {"v0", "t_s", "t_so", "lattice_constant", "trap_frequency",
                                      "recoil_energy", "detuning_marginal"});
  for (const auto& vj : cfg.at("v0_list")) {
    tqm::wannier::WannierInputs in;
    in.v0 = vj.get<double>();
    in.k0 = jd(cfg, "k0");
    in.mass = jd(cfg, "mass");
    in.omega_rabi = jd(cfg, "omega_rabi");
    in.delta_one_photon = jd(cfg, "delta_one_photon");
    const auto h = tqm::wannier::hopping_integrals(in);
    csv.row({CsvWriter::cell(in.v0), CsvWriter::cell(h.t_s), CsvWriter::cell(h.t_so),
             CsvWriter::cell(h.lattice_constant), CsvWriter::cell(h.trap_frequency),
             CsvWriter::cell(h.recoil_energy), CsvWriter::cell(h.detuning_marginal ? 1 : 0)});
  }
  return {0, {"hopping.csv"}};
}

// ---------------------------------------------------------------- tables ---

ordered_json defaults_for(const std::string& sub) {
  const double root_half = tqm::kInvSqrt2;
  if (sub == "phase-diagram")
    return {{"t_s", 1.0},
            {"gamma_z", {{"min", -3.0}, {"max", 3.0}, {"count", 41}}},
            {"t_so", {{"min", 0.1}, {"max", 2.1}, {"count", 41}}},
            {"n_k", 1024}};
  if (sub == "edge-modes")
    return {{"t_s", 1.0}, {"t_so", 0.5}, {"gamma_z", 0.0}, {"n_list", {8, 12, 16, 20, 24}}};
  if (sub == "domain")
    return {{"n_sites", 60},      {"t_s", 1.0},
            {"t_so", 0.5},        {"gamma_z", 0.0},
            {"gamma_0", 2.0},     {"axis", "y"},
            {"x1", 20},           {"x2", 40},
            {"ramp", ordered_json::array()},
            {"dt", 0.05},         {"n_samples", 0},
            {"leakage_limit", 0.05}};
  if (sub == "memory-verify") {
    tqm::gates::QndParams qnd;
    tqm::gates::AncillaParams anc;
    return {{"n_spins", 3},
            {"residual", 0.0},
            {"n_trials", 64},
            {"transfer_time_factor", 1.0},
            {"corrupt_phase_offset", 0.0},
            {"qnd", {{"g", qnd.g}, {"delta", qnd.delta}}},
            {"ancilla",
             {{"g_prime", anc.g_prime}, {"omega_a", anc.omega_a}, {"delta_prime", anc.delta_prime}}}};
  }
  const ordered_json headline_rates = {{"kappa_a", 1.0},
                                       {"kappa_b", 1.0},
                                       {"kappa_d", 0.1},
                                       {"gamma_a", 0.1},
                                       {"gamma_s", 0.1}};
  if (sub == "transfer")
    return {{"g", 6.0 * tqm::kPi},
            {"k_order", 1},
            {"rates", headline_rates},
            {"alpha", {root_half, 0.0}},
            {"beta", {root_half, 0.0}},
            {"t_final", 0.0},
            {"n_samples", 600},
            {"dt", 0.0},
            {"compare_rates_scaled_reading", true}};
  if (sub == "mismatch")
    return {{"g", 6.0 * tqm::kPi},
            {"k_order", 1},
            {"rates", headline_rates},
            {"alpha", {root_half, 0.0}},
            {"beta", {root_half, 0.0}},
            {"fractions", {-0.1, -0.05, 0.0, 0.05, 0.1}},
            {"t_final", 0.0},
            {"n_samples", 600},
            {"dt", 0.0}};
  if (sub == "large-r")
    return {{"g", 6.0 * tqm::kPi},
            {"k_list", {1, 2}},
            {"rates", headline_rates},
            {"alpha", {root_half, 0.0}},
            {"beta", {root_half, 0.0}},
            {"t_final", 0.0},
            {"n_samples", 600},
            {"dt", 0.0}};
  if (sub == "budget") {
    tqm::BudgetInputs in;
    return {{"n_atoms", in.n_atoms},
            {"g", in.g},
            {"gamma", in.gamma},
            {"kappa", in.kappa},
            {"delta", in.delta},
            {"omega_a", in.omega_a},
            {"delta_prime", in.delta_prime},
            {"epsilon_addr", in.epsilon_addr},
            {"p_interface", in.p_interface},
            {"addressed_sites", in.addressed_sites},
            {"f2", 0.95},
            {"quoted_f_cs", 0.95},
            {"loss_figure", 0.03}};
  }
  if (sub == "hopping")
    return {{"k0", 1.0},
            {"mass", 1.0},
            {"omega_rabi", 0.2},
            {"delta_one_photon", 2.0},
            {"v0_list", {4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0}}};
  throw std::logic_error("no defaults registered for subcommand " + sub);
}

std::vector<std::string> frequency_fields_for(const std::string& sub) {
  if (sub == "memory-verify")
    return {"qnd.g", "qnd.delta", "ancilla.g_prime", "ancilla.omega_a", "ancilla.delta_prime"};
  if (sub == "transfer" || sub == "mismatch" || sub == "large-r")
    return {"g", "rates.kappa_a", "rates.kappa_b", "rates.kappa_d", "rates.gamma_a",
            "rates.gamma_s"};
  if (sub == "budget")
    return {"g", "gamma", "kappa", "delta", "omega_a", "delta_prime"};
  if (sub == "hopping") return {"v0_list_elements", "omega_rabi", "delta_one_photon"};
  return {};  // chain subcommands are in dimensionless hopping units
}

using Handler = RunResult (*)(const ordered_json&, const CommonOpts&, const fs::path&);

struct Subcommand {
  const char* name;
  const char* help;
  Handler handler;
};

constexpr Subcommand kSubcommands[] = {
    {"phase-diagram", "winding number and bulk gap over a (gamma_z, t_so) grid",
     run_phase_diagram},
    {"edge-modes", "end-mode splitting and localization versus chain length", run_edge_modes},
    {"domain", "domain-wall pair analysis and optional field-rotation ramp", run_domain},
    {"memory-verify", "cross-checks of the cavity memory gate protocol", run_memory_verify},
    {"transfer", "excitation transfer fidelity curve under dissipation", run_transfer},
    {"mismatch", "peak transfer fidelity under coupling-ratio mismatch", run_mismatch},
    {"large-r", "mechanical-decay sensitivity versus coupling-ratio order", run_large_r},
    {"budget", "composed fidelity budget from cavity and transfer numbers", run_budget},
    {"hopping", "lattice hopping integrals from the optical-well orbitals", run_hopping},
};

int dispatch(const std::string& sub, Handler handler, const CommonOpts& opts) {
  ordered_json cfg = resolve_config(defaults_for(sub), opts);
  if (opts.linear_frequency) {
    auto keys = frequency_fields_for(sub);
    if (auto it = std::find(keys.begin(), keys.end(), "v0_list_elements"); it != keys.end()) {
      keys.erase(it);
      for (auto& v : cfg.at("v0_list")) v = v.get<double>() * 2.0 * tqm::kPi;
    }
    apply_linear_frequency(cfg, keys);
  }

  const fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  const RunResult result = handler(cfg, opts, dir);
  write_manifest(dir, sub, opts, cfg, result.outputs);
  return result.code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tqmsim: chain topology, cavity memory gate, transfer, and budget studies"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "JSON config merged over built-in defaults")
      ->check(CLI::ExistingFile);
  app.add_option("--out", opts.out_dir, "output directory (created if missing)");
  app.add_option("--seed", opts.seed, "seed for randomized trial states");
  app.add_flag("--linear-frequency", opts.linear_frequency,
               "treat config frequencies as ordinary (non-angular); multiplies them by 2*pi");
  app.add_option("--dt", opts.dt, "override the config integrator step where applicable");
  app.add_option("--samples", opts.samples, "override the config sample count where applicable");

  for (const auto& sc : kSubcommands) app.add_subcommand(sc.name, sc.help);

  CLI11_PARSE(app, argc, argv);

  const std::string chosen = app.get_subcommands().front()->get_name();
  try {
    for (const auto& sc : kSubcommands)
      if (chosen == sc.name) return dispatch(chosen, sc.handler, opts);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
