#include "pilotwave/runner/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pilotwave/errors.hpp"

namespace pilotwave::runner {

using nlohmann::json;

namespace {

struct ScenarioInfo {
  Scenario id;
  std::string_view name;
  std::string_view summary;
};

constexpr ScenarioInfo kScenarios[] = {
    {Scenario::FreeGaussian, "free_gaussian",
     "free Gaussian spreading: propagator oracles, trajectories, equivariance"},
    {Scenario::PlaneWave, "plane_wave", "plane wave: constant velocity field and uniform trajectories"},
    {Scenario::TwoGaussianSuperposition, "two_gaussian_superposition",
     "colliding packets: interference, node handling, equivariance"},
    {Scenario::HarmonicOscillator, "harmonic_oscillator",
     "oscillator ground state: stationarity, Bohmian energy, static trajectories"},
    {Scenario::CounterexampleVPlusX, "counterexample_v_plus_x",
     "weak values of V, X and V + X for a plane wave post-selected at x_o"},
    {Scenario::ProtocolVelocity, "protocol_velocity",
     "weak velocity measurement with position post-selection, binned by f"},
    {Scenario::BiasScan, "bias_scan", "protocol bias against the coupling strength"},
    {Scenario::Backaction, "backaction", "trajectory divergence caused by the coupling"},
};

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"norm_drift", 1e-10},       {"width_rel", 1e-3},       {"center_rel", 1e-3},
      {"trajectory_rel", 5e-3},    {"trajectory_abs", 1e-8},  {"equivariance_tv", 0.06},
      {"equivariance_growth", 0.03}, {"identity", 1e-8},      {"velocity_identity", 1e-10},
      {"eigen_energy", 1e-6},      {"stationary", 1e-10},     {"weak_value", 1e-8},
      {"standard_errors", 3.0},    {"weak_regime", 0.2},      {"bias_ratio", 0.7},
      {"backaction_factor", 10.0}, {"integrator", 1e-6},      {"continuity", 1e-4},
  };
  return t;
}

// 1-based line of a byte offset.
std::size_t line_of(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Finds the first key repeated within one object. nlohmann keeps the last
// value silently, so this runs over the raw text first.
void reject_duplicate_keys(std::string_view text) {
  std::vector<std::set<std::string>> objects;
  std::vector<bool> is_object;
  std::size_t line = 1;
  bool expect_key = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '{') {
      objects.emplace_back();
      is_object.push_back(true);
      expect_key = true;
    } else if (c == '[') {
      is_object.push_back(false);
      expect_key = false;
    } else if (c == '}' || c == ']') {
      if (!is_object.empty()) {
        if (is_object.back()) objects.pop_back();
        is_object.pop_back();
      }
      expect_key = false;
    } else if (c == ',') {
      expect_key = !is_object.empty() && is_object.back();
    } else if (c == '"') {
      const std::size_t start_line = line;
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) s += text[i++];
        if (text[i] == '\n') ++line;
        s += text[i];
      }
      if (expect_key && !objects.empty()) {
        if (!objects.back().insert(s).second) throw ParseError(start_line, "duplicate key \"" + s + "\"");
        expect_key = false;
      }
    }
  }
}

// Typed access to one JSON object with path-qualified violations and
// unknown-key detection.
class Section {
 public:
  Section(const json& node, std::string path, std::vector<std::string>& violations)
      : node_(node), path_(std::move(path)), v_(violations) {
    if (!node_.is_object()) fail("", "must be an object");
  }
  ~Section() {
    if (!node_.is_object()) return;
    for (const auto& [key, _] : node_.items()) {
      if (!seen_.count(key)) v_.push_back(qualified(key) + ": unknown key");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.is_object() && node_.contains(key);
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const auto& n = node_.at(key);
    if (!n.is_number()) return fail(key, "must be a number");
    out = n.get<double>();
    if (!std::isfinite(out)) fail(key, "must be finite");
  }

  void count(const std::string& key, std::size_t& out) {
    if (!has(key)) return;
    const auto& n = node_.at(key);
    if (!n.is_number_integer() || n.get<long long>() < 0) return fail(key, "must be a non-negative integer");
    out = n.get<std::size_t>();
  }

  void integer(const std::string& key, long& out) {
    if (!has(key)) return;
    const auto& n = node_.at(key);
    if (!n.is_number_integer()) return fail(key, "must be an integer");
    out = n.get<long>();
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const auto& n = node_.at(key);
    if (!n.is_number_unsigned() && !(n.is_number_integer() && n.get<long long>() >= 0)) {
      return fail(key, "must be a non-negative integer");
    }
    out = n.get<std::uint64_t>();
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const auto& n = node_.at(key);
    if (!n.is_boolean()) return fail(key, "must be true or false");
    out = n.get<bool>();
  }

  void text(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const auto& n = node_.at(key);
    if (!n.is_string()) return fail(key, "must be a string");
    out = n.get<std::string>();
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const auto& n = node_.at(key);
    if (!n.is_array()) return fail(key, "must be an array of numbers");
    out.clear();
    for (const auto& e : n) {
      if (!e.is_number()) return fail(key, "must be an array of numbers");
      out.push_back(e.get<double>());
    }
  }

  const json* child(const std::string& key) {
    if (!has(key)) return nullptr;
    return &node_.at(key);
  }

  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : key.empty() ? path_ : path_ + "." + key;
  }
  void fail(const std::string& key, const std::string& message) {
    v_.push_back(qualified(key) + ": " + message);
  }

 private:
  const json& node_;
  std::string path_;
  std::vector<std::string>& v_;
  std::set<std::string> seen_;
};

void require(bool ok, std::vector<std::string>& v, const std::string& message) {
  if (!ok) v.push_back(message);
}

void validate(const ScenarioConfig& c, std::vector<std::string>& v) {
  require(c.grid.x_max > c.grid.x_min, v, "grid.x_max: must exceed grid.x_min");
  require(is_power_of_two(c.grid.n_points) && c.grid.n_points >= 2, v,
          "grid.n_points: must be a power of two >= 2 (got " + std::to_string(c.grid.n_points) + ")");
  require(c.constants.hbar > 0.0, v, "constants.hbar: must be > 0");
  require(c.constants.mass > 0.0, v, "constants.mass: must be > 0");

  const auto& s = c.state;
  if (s.kind == "gaussian") {
    require(s.sigma > 0.0, v, "state.sigma: must be > 0");
  } else if (s.kind == "plane_wave") {
    require(2 * std::abs(s.k_index) < static_cast<long>(c.grid.n_points), v,
            "state.k_index: not representable on the grid (|k_index| < n_points/2)");
  } else if (s.kind == "superposition") {
    require(!s.terms.empty(), v, "state.terms: must list at least one Gaussian");
    for (std::size_t i = 0; i < s.terms.size(); ++i) {
      require(s.terms[i].sigma > 0.0, v, "state.terms[" + std::to_string(i) + "].sigma: must be > 0");
    }
  } else if (s.kind == "harmonic_ground") {
    require(s.omega > 0.0, v, "state.omega: must be > 0");
  } else {
    v.push_back("state.kind: must be one of gaussian, plane_wave, superposition, harmonic_ground");
  }

  const auto& p = c.potential;
  if (p.kind == "harmonic") {
    require(p.omega > 0.0, v, "potential.omega: must be > 0");
  } else if (p.kind == "gaussian_barrier") {
    require(p.width > 0.0, v, "potential.width: must be > 0");
  } else if (p.kind != "free") {
    v.push_back("potential.kind: must be one of free, harmonic, gaussian_barrier");
  }

  require(c.evolution.dt >= 0.0, v, "evolution.dt: must be > 0 (or 0 for the default step)");
  require(c.evolution.snapshot_stride >= 1, v, "evolution.snapshot_stride: must be >= 1");
  require(c.evolution.snapshot_stride == 0 || c.evolution.n_steps % std::max<std::size_t>(1, c.evolution.snapshot_stride) == 0,
          v, "evolution.snapshot_stride: must divide evolution.n_steps");

  require(c.ensemble.n_trajectories >= 1, v, "ensemble.n_trajectories: must be >= 1");
  require(c.ensemble.n_bins >= 1, v, "ensemble.n_bins: must be >= 1");
  require(c.ensemble.density_floor > 0.0 && c.ensemble.density_floor <= 1e-3, v,
          "ensemble.density_floor: must lie in (0, 1e-3]");

  const auto& pr = c.protocol;
  require(pr.op == "velocity" || pr.op == "position" || pr.op == "momentum", v,
          "protocol.operator: must be one of velocity, position, momentum");
  require(pr.coupling_g > 0.0, v, "protocol.coupling_g: must be > 0");
  require(pr.n_runs >= 1, v, "protocol.n_runs: must be >= 1");
  const double dx = (c.grid.x_max - c.grid.x_min) / static_cast<double>(std::max<std::size_t>(1, c.grid.n_points));
  require(pr.f_bin_width >= dx * (1.0 - 1e-12), v, "protocol.f_bin_width: must be >= the grid spacing");
  require(pr.pointer.y_min < 0.0 && pr.pointer.y_max > 0.0, v, "protocol.pointer: y range must contain 0");
  require(is_power_of_two(pr.pointer.n_points) && pr.pointer.n_points >= 2, v,
          "protocol.pointer.n_points: must be a power of two >= 2");
  require(pr.pointer.sigma > 0.0, v, "protocol.pointer.sigma: must be > 0");
  require(pr.horizon > 0.0, v, "protocol.horizon: must be > 0");
  require(pr.n_trajectories >= 1, v, "protocol.n_trajectories: must be >= 1");
  require(pr.snapshot_stride >= 1 && pr.n_steps >= 1 && pr.n_steps % std::max<std::size_t>(1, pr.snapshot_stride) == 0,
          v, "protocol.snapshot_stride: must divide protocol.n_steps (both >= 1)");
  if (c.scenario == Scenario::BiasScan) {
    require(pr.g_values.size() >= 2, v, "protocol.g_values: bias_scan needs at least two values");
    for (std::size_t i = 1; i < pr.g_values.size(); ++i) {
      if (!(pr.g_values[i] < pr.g_values[i - 1])) {
        v.push_back("protocol.g_values: must be strictly descending for bias_scan");
        break;
      }
    }
    for (double g : pr.g_values) {
      if (!(g > 0.0)) {
        v.push_back("protocol.g_values: must be > 0 for bias_scan");
        break;
      }
    }
  }
  if (c.scenario == Scenario::Backaction) {
    require(!pr.g_values.empty(), v, "protocol.g_values: backaction needs at least one value");
    for (double g : pr.g_values) {
      if (!(g >= 0.0)) {
        v.push_back("protocol.g_values: must be >= 0 for backaction");
        break;
      }
    }
  }

  if (c.scenario == Scenario::CounterexampleVPlusX) {
    require(2 * std::abs(c.counterexample.k_index) < static_cast<long>(c.grid.n_points), v,
            "counterexample.k_index: not representable on the grid");
  }
  for (const auto& [name, value] : c.tolerances) {
    require(value > 0.0, v, "tolerances." + name + ": must be > 0");
  }
}

}  // namespace

const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> list = [] {
    std::vector<Scenario> l;
    for (const auto& s : kScenarios) l.push_back(s.id);
    return l;
  }();
  return list;
}

std::string_view scenario_name(Scenario s) {
  for (const auto& info : kScenarios) {
    if (info.id == s) return info.name;
  }
  return "unknown";
}

std::string_view scenario_summary(Scenario s) {
  for (const auto& info : kScenarios) {
    if (info.id == s) return info.summary;
  }
  return "";
}

double ScenarioConfig::tolerance(const std::string& name) const {
  const auto it = tolerances.find(name);
  if (it == tolerances.end()) throw InvalidArgument("unknown tolerance " + name);
  return it->second;
}

ScenarioConfig default_config(Scenario s) {
  ScenarioConfig c;
  c.scenario = s;
  c.output_dir = "output/" + std::string(scenario_name(s));
  c.tolerances = default_tolerances();
  const double spread_time = 2.0 * std::sqrt(3.0);  // width doubles for sigma0 = 1
  switch (s) {
    case Scenario::FreeGaussian:
      c.grid = {-40.0, 40.0, 512};
      c.state.kind = "gaussian";
      c.state.k0 = 1.0;
      c.evolution = {spread_time / 10000.0, 10000, 100};
      break;
    case Scenario::PlaneWave:
      c.grid = {0.0, 2.0 * M_PI, 64};
      c.state.kind = "plane_wave";
      c.state.k_index = 4;
      c.evolution = {0.01, 300, 10};
      c.ensemble.n_trajectories = 100;
      break;
    case Scenario::TwoGaussianSuperposition:
      c.grid = {-30.0, 30.0, 512};
      c.state.kind = "superposition";
      c.state.terms = {{1.0, 0.0, -5.0, 1.0, 2.0}, {1.0, 0.0, 5.0, 1.0, -2.0}};
      c.evolution = {0.002, 2500, 50};
      break;
    case Scenario::HarmonicOscillator:
      c.grid = {-10.0, 10.0, 512};
      c.state.kind = "harmonic_ground";
      c.potential.kind = "harmonic";
      c.evolution = {0.0, 32768, 4096};
      c.ensemble.n_trajectories = 200;
      break;
    case Scenario::CounterexampleVPlusX:
      c.grid = {0.5 - M_PI, 0.5 + M_PI, 64};
      c.state.kind = "plane_wave";
      c.state.k_index = 4;
      break;
    case Scenario::ProtocolVelocity:
    case Scenario::BiasScan:
    case Scenario::Backaction:
      c.grid = {-20.0, 20.0, 256};
      c.state.kind = "gaussian";
      c.state.k0 = 1.0;
      c.evolution = {0.001, 1000, 1000};
      if (s == Scenario::BiasScan) c.protocol.g_values = {0.64, 0.32, 0.16, 0.08};
      if (s == Scenario::Backaction) {
        c.evolution = {0.001, 0, 1};
        c.protocol.g_values = {0.0, 0.1, 0.2, 0.4, 0.8};
      }
      break;
  }
  return c;
}

ScenarioConfig parse_config(std::string_view text) {
  reject_duplicate_keys(text);
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(line_of(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  if (!doc.is_object()) throw ParseError(1, "config must be a JSON object");

  std::vector<std::string> v;
  if (!doc.contains("scenario") || !doc["scenario"].is_string()) {
    throw ValidationError({"scenario: required string naming one of the scenarios"});
  }
  const auto name = doc["scenario"].get<std::string>();
  const auto* info = std::find_if(std::begin(kScenarios), std::end(kScenarios),
                                  [&](const ScenarioInfo& s) { return s.name == name; });
  if (info == std::end(kScenarios)) throw ValidationError({"scenario: unknown scenario \"" + name + "\""});

  ScenarioConfig c = default_config(info->id);
  {
    Section root(doc, "", v);
    root.has("scenario");
    root.seed("seed", c.seed);
    root.text("output_dir", c.output_dir);

    if (const auto* n = root.child("counterexample")) {
      Section s(*n, "counterexample", v);
      s.integer("k_index", c.counterexample.k_index);
      s.number("x_o", c.counterexample.x_o);
    }
    if (c.scenario == Scenario::CounterexampleVPlusX) {
      // box of length 2 pi centered on x_o, so x_o is a grid point
      c.grid.x_min = c.counterexample.x_o - M_PI;
      c.grid.x_max = c.counterexample.x_o + M_PI;
    }
    if (const auto* n = root.child("grid")) {
      Section s(*n, "grid", v);
      s.number("x_min", c.grid.x_min);
      s.number("x_max", c.grid.x_max);
      s.count("n_points", c.grid.n_points);
    }
    if (const auto* n = root.child("constants")) {
      Section s(*n, "constants", v);
      s.number("hbar", c.constants.hbar);
      s.number("mass", c.constants.mass);
    }
    if (const auto* n = root.child("state")) {
      Section s(*n, "state", v);
      s.text("kind", c.state.kind);
      s.number("center", c.state.center);
      s.number("sigma", c.state.sigma);
      s.number("k0", c.state.k0);
      s.integer("k_index", c.state.k_index);
      s.number("omega", c.state.omega);
      if (const auto* t = s.child("terms")) {
        if (!t->is_array()) {
          s.fail("terms", "must be an array");
        } else {
          c.state.terms.clear();
          for (std::size_t i = 0; i < t->size(); ++i) {
            GaussianTerm term;
            Section ts((*t)[i], "state.terms[" + std::to_string(i) + "]", v);
            ts.number("re", term.re);
            ts.number("im", term.im);
            ts.number("center", term.center);
            ts.number("sigma", term.sigma);
            ts.number("k0", term.k0);
            c.state.terms.push_back(term);
          }
        }
      }
    }
    if (const auto* n = root.child("potential")) {
      Section s(*n, "potential", v);
      s.text("kind", c.potential.kind);
      s.number("omega", c.potential.omega);
      s.number("x_center", c.potential.x_center);
      s.number("height", c.potential.height);
      s.number("width", c.potential.width);
    }
    if (const auto* n = root.child("evolution")) {
      Section s(*n, "evolution", v);
      s.number("dt", c.evolution.dt);
      s.count("n_steps", c.evolution.n_steps);
      s.count("snapshot_stride", c.evolution.snapshot_stride);
    }
    if (const auto* n = root.child("ensemble")) {
      Section s(*n, "ensemble", v);
      s.count("n_trajectories", c.ensemble.n_trajectories);
      s.count("n_bins", c.ensemble.n_bins);
      s.number("density_floor", c.ensemble.density_floor);
    }
    if (const auto* n = root.child("protocol")) {
      Section s(*n, "protocol", v);
      s.text("operator", c.protocol.op);
      s.number("coupling_g", c.protocol.coupling_g);
      s.count("n_runs", c.protocol.n_runs);
      s.number("f_bin_width", c.protocol.f_bin_width);
      s.boolean("keep_pairs", c.protocol.keep_pairs);
      s.numbers("g_values", c.protocol.g_values);
      s.number("horizon", c.protocol.horizon);
      s.count("n_trajectories", c.protocol.n_trajectories);
      s.count("n_steps", c.protocol.n_steps);
      s.count("snapshot_stride", c.protocol.snapshot_stride);
      if (const auto* p = s.child("pointer")) {
        Section ps(*p, "protocol.pointer", v);
        ps.number("y_min", c.protocol.pointer.y_min);
        ps.number("y_max", c.protocol.pointer.y_max);
        ps.count("n_points", c.protocol.pointer.n_points);
        ps.number("sigma", c.protocol.pointer.sigma);
      }
    }
    if (const auto* n = root.child("tolerances")) {
      if (!n->is_object()) {
        v.push_back("tolerances: must be an object");
      } else {
        for (const auto& [key, value] : n->items()) {
          if (!c.tolerances.count(key)) {
            v.push_back("tolerances." + key + ": unknown key");
          } else if (!value.is_number()) {
            v.push_back("tolerances." + key + ": must be a number");
          } else {
            c.tolerances[key] = value.get<double>();
          }
        }
      }
    }
  }
  validate(c, v);
  if (!v.empty()) throw ValidationError(std::move(v));
  return c;
}

std::string config_to_json(const ScenarioConfig& c) {
  json terms = json::array();
  for (const auto& t : c.state.terms) {
    terms.push_back({{"re", t.re}, {"im", t.im}, {"center", t.center}, {"sigma", t.sigma}, {"k0", t.k0}});
  }
  json doc = {
      {"scenario", std::string(scenario_name(c.scenario))},
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"grid", {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"n_points", c.grid.n_points}}},
      {"constants", {{"hbar", c.constants.hbar}, {"mass", c.constants.mass}}},
      {"state",
       {{"kind", c.state.kind},
        {"center", c.state.center},
        {"sigma", c.state.sigma},
        {"k0", c.state.k0},
        {"k_index", c.state.k_index},
        {"omega", c.state.omega},
        {"terms", terms}}},
      {"potential",
       {{"kind", c.potential.kind},
        {"omega", c.potential.omega},
        {"x_center", c.potential.x_center},
        {"height", c.potential.height},
        {"width", c.potential.width}}},
      {"evolution",
       {{"dt", c.evolution.dt}, {"n_steps", c.evolution.n_steps}, {"snapshot_stride", c.evolution.snapshot_stride}}},
      {"ensemble",
       {{"n_trajectories", c.ensemble.n_trajectories},
        {"n_bins", c.ensemble.n_bins},
        {"density_floor", c.ensemble.density_floor}}},
      {"protocol",
       {{"operator", c.protocol.op},
        {"coupling_g", c.protocol.coupling_g},
        {"n_runs", c.protocol.n_runs},
        {"f_bin_width", c.protocol.f_bin_width},
        {"keep_pairs", c.protocol.keep_pairs},
        {"g_values", c.protocol.g_values},
        {"horizon", c.protocol.horizon},
        {"n_trajectories", c.protocol.n_trajectories},
        {"n_steps", c.protocol.n_steps},
        {"snapshot_stride", c.protocol.snapshot_stride},
        {"pointer",
         {{"y_min", c.protocol.pointer.y_min},
          {"y_max", c.protocol.pointer.y_max},
          {"n_points", c.protocol.pointer.n_points},
          {"sigma", c.protocol.pointer.sigma}}}}},
      {"counterexample", {{"k_index", c.counterexample.k_index}, {"x_o", c.counterexample.x_o}}},
      {"tolerances", c.tolerances},
  };
  return doc.dump(2);
}

}  // namespace pilotwave::runner
