// SPDX-License-Identifier: Apache-2.0

#include "mxlqr/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace mxlqr {

namespace {

struct KeyValue {
  std::string value;
  std::string where;  // "file:line" or json pointer
};

using KvMap = std::map<std::string, KeyValue>;

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ConfigError(where + ": " + msg);
}

double parse_double(const KvMap& kv, const std::string& key, double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    size_t pos = 0;
    double v = std::stod(it->second.value, &pos);
    if (pos != it->second.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail(it->second.where, "expected a number for '" + key + "', got '" +
                               it->second.value + "'");
  }
}

long long parse_int(const KvMap& kv, const std::string& key, long long fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    size_t pos = 0;
    long long v = std::stoll(it->second.value, &pos);
    if (pos != it->second.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail(it->second.where, "expected an integer for '" + key + "', got '" +
                               it->second.value + "'");
  }
}

std::uint64_t parse_u64(const KvMap& kv, const std::string& key,
                        std::uint64_t fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(it->second.value, &pos);
    if (pos != it->second.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail(it->second.where, "expected an unsigned integer for '" + key + "'");
  }
}

std::string parse_string(const KvMap& kv, const std::string& key,
                         const std::string& fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second.value;
}

std::vector<int> parse_int_list(const KvMap& kv, const std::string& key,
                                std::vector<int> fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::vector<int> out;
  std::stringstream ss(it->second.value);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) continue;
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      fail(it->second.where, "bad integer list entry '" + tok + "' for '" + key + "'");
    }
  }
  return out;
}

std::vector<std::string> parse_string_list(const KvMap& kv, const std::string& key,
                                           std::vector<std::string> fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::vector<std::string> out;
  std::stringstream ss(it->second.value);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "grid.nx", "grid.ny",
      "time.T", "time.nt",
      "materials.eps.kind", "materials.eps.value", "materials.eps.amplitude",
      "materials.eps.center_x", "materials.eps.center_y", "materials.eps.width",
      "materials.mu.value", "materials.sigma.value",
      "boundary.kappa",
      "problem.alpha", "problem.s_index",
      "problem.terminal_weight.kind", "problem.terminal_weight.n",
      "initial_state.preset", "initial_state.center_x", "initial_state.center_y",
      "initial_state.width", "initial_state.amplitude", "initial_state.seed",
      "solver.cg_tol", "solver.cg_max_iter",
      "study.n_list", "study.num_probes", "study.sample_steps",
      "study.p_eval_steps", "study.admissibility_samples",
      "output.dir", "output.formats",
  };
  return keys;
}

ExperimentConfig from_kv(const KvMap& kv) {
  const auto& known = known_keys();
  for (const auto& [key, val] : kv) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail(val.where, "unknown key '" + key + "'");
    }
  }

  ExperimentConfig c;
  c.grid.nx = static_cast<int>(parse_int(kv, "grid.nx", c.grid.nx));
  c.grid.ny = static_cast<int>(parse_int(kv, "grid.ny", c.grid.ny));
  c.time.T = parse_double(kv, "time.T", c.time.T);
  c.time.nt = static_cast<int>(parse_int(kv, "time.nt", c.time.nt));
  c.materials.eps_kind = parse_string(kv, "materials.eps.kind", c.materials.eps_kind);
  c.materials.eps_value = parse_double(kv, "materials.eps.value", c.materials.eps_value);
  c.materials.eps_amplitude =
      parse_double(kv, "materials.eps.amplitude", c.materials.eps_amplitude);
  c.materials.eps_center_x =
      parse_double(kv, "materials.eps.center_x", c.materials.eps_center_x);
  c.materials.eps_center_y =
      parse_double(kv, "materials.eps.center_y", c.materials.eps_center_y);
  c.materials.eps_width = parse_double(kv, "materials.eps.width", c.materials.eps_width);
  c.materials.mu_value = parse_double(kv, "materials.mu.value", c.materials.mu_value);
  c.materials.sigma_value =
      parse_double(kv, "materials.sigma.value", c.materials.sigma_value);
  c.boundary.kappa = parse_double(kv, "boundary.kappa", c.boundary.kappa);
  c.problem.alpha = parse_double(kv, "problem.alpha", c.problem.alpha);
  c.problem.s_index = static_cast<int>(parse_int(kv, "problem.s_index", c.problem.s_index));
  c.problem.terminal_weight =
      parse_string(kv, "problem.terminal_weight.kind", c.problem.terminal_weight);
  c.problem.terminal_n =
      static_cast<int>(parse_int(kv, "problem.terminal_weight.n", c.problem.terminal_n));
  c.initial_state.preset = parse_string(kv, "initial_state.preset", c.initial_state.preset);
  c.initial_state.center_x =
      parse_double(kv, "initial_state.center_x", c.initial_state.center_x);
  c.initial_state.center_y =
      parse_double(kv, "initial_state.center_y", c.initial_state.center_y);
  c.initial_state.width = parse_double(kv, "initial_state.width", c.initial_state.width);
  c.initial_state.amplitude =
      parse_double(kv, "initial_state.amplitude", c.initial_state.amplitude);
  c.initial_state.seed = parse_u64(kv, "initial_state.seed", c.initial_state.seed);
  c.solver.cg_tol = parse_double(kv, "solver.cg_tol", c.solver.cg_tol);
  c.solver.cg_max_iter =
      static_cast<int>(parse_int(kv, "solver.cg_max_iter", c.solver.cg_max_iter));
  c.study.n_list = parse_int_list(kv, "study.n_list", c.study.n_list);
  c.study.num_probes = static_cast<int>(parse_int(kv, "study.num_probes", c.study.num_probes));
  c.study.sample_steps = parse_int_list(kv, "study.sample_steps", c.study.sample_steps);
  c.study.p_eval_steps = parse_int_list(kv, "study.p_eval_steps", c.study.p_eval_steps);
  c.study.admissibility_samples = static_cast<int>(
      parse_int(kv, "study.admissibility_samples", c.study.admissibility_samples));
  c.output.dir = parse_string(kv, "output.dir", c.output.dir);
  c.output.formats = parse_string_list(kv, "output.formats", c.output.formats);
  c.validate();
  return c;
}

void flatten_json(const nlohmann::json& j, const std::string& prefix, KvMap& kv) {
  if (j.is_object()) {
    for (const auto& [key, val] : j.items()) {
      flatten_json(val, prefix.empty() ? key : prefix + "." + key, kv);
    }
    return;
  }
  std::string text;
  if (j.is_array()) {
    std::ostringstream os;
    bool first = true;
    for (const auto& el : j) {
      if (!first) os << ",";
      first = false;
      if (el.is_string()) {
        os << el.get<std::string>();
      } else {
        os << el.dump();
      }
    }
    text = os.str();
  } else if (j.is_string()) {
    text = j.get<std::string>();
  } else {
    text = j.dump();
  }
  kv[prefix] = {text, "$." + prefix};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_text(const std::string& text,
                                             const std::string& origin) {
  KvMap kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto notspace = line.find_first_not_of(" \t\r\n");
    if (notspace == std::string::npos) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) {
      fail(where, "expected 'key = value'");
    }
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r\n"));
      s.erase(s.find_last_not_of(" \t\r\n") + 1);
      return s;
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(where, "empty key");
    if (kv.count(key)) fail(where, "duplicate key '" + key + "'");
    kv[key] = {value, where};
  }
  return from_kv(kv);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(origin + ": top-level JSON object expected");
  KvMap kv;
  flatten_json(j, "", kv);
  return from_kv(kv);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  return is_json ? from_json_text(buf.str(), path) : from_text(buf.str(), path);
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(grid.nx >= 4 && grid.ny >= 4, "grid.nx/grid.ny: must be >= 4");
  require(time.T > 0.0, "time.T: must be > 0");
  require(time.nt >= 1, "time.nt: must be >= 1");
  require(materials.eps_kind == "const" || materials.eps_kind == "gaussian-bump",
          "materials.eps.kind: must be 'const' or 'gaussian-bump'");
  require(materials.eps_value > 0.0, "materials.eps.value: must be > 0");
  if (materials.eps_kind == "gaussian-bump") {
    require(materials.eps_value + std::min(0.0, materials.eps_amplitude) > 0.0,
            "materials.eps.amplitude: bump makes eps nonpositive");
    require(materials.eps_width > 0.0, "materials.eps.width: must be > 0");
  }
  require(materials.mu_value > 0.0, "materials.mu.value: must be > 0");
  require(materials.sigma_value >= 0.0, "materials.sigma.value: must be >= 0");
  require(boundary.kappa > 0.0, "boundary.kappa: must be > 0");
  require(problem.alpha > 0.0, "problem.alpha: must be > 0");
  require(problem.s_index >= 0 && problem.s_index < time.nt,
          "problem.s_index: must lie in [0, nt)");
  require(problem.terminal_weight == "identity" ||
              problem.terminal_weight == "resolvent_smoothed",
          "problem.terminal_weight.kind: must be 'identity' or 'resolvent_smoothed'");
  require(problem.terminal_n >= 1, "problem.terminal_weight.n: must be >= 1");
  require(initial_state.preset == "gaussian" ||
              initial_state.preset == "boundary-silent" ||
              initial_state.preset == "random",
          "initial_state.preset: must be 'gaussian', 'boundary-silent' or 'random'");
  require(initial_state.width > 0.0, "initial_state.width: must be > 0");
  require(solver.cg_tol > 0.0, "solver.cg_tol: must be > 0");
  require(solver.cg_max_iter >= 0, "solver.cg_max_iter: must be >= 0");
  require(!study.n_list.empty(), "study.n_list: must be nonempty");
  for (size_t i = 0; i < study.n_list.size(); ++i) {
    require(study.n_list[i] >= 1, "study.n_list: entries must be >= 1");
    if (i > 0) {
      require(study.n_list[i] > study.n_list[i - 1],
              "study.n_list: entries must be strictly increasing");
    }
  }
  require(study.num_probes >= 1, "study.num_probes: must be >= 1");
  for (int k : study.sample_steps) {
    require(k > problem.s_index && k < time.nt,
            "study.sample_steps: entries must lie in (s_index, nt)");
  }
  for (int k : study.p_eval_steps) {
    require(k >= problem.s_index && k <= time.nt,
            "study.p_eval_steps: entries must lie in [s_index, nt]");
  }
  require(study.admissibility_samples >= 1,
          "study.admissibility_samples: must be >= 1");
  for (const auto& f : output.formats) {
    require(f == "json" || f == "csv", "output.formats: must be 'json' or 'csv'");
  }
}

std::vector<int> ExperimentConfig::effective_sample_steps() const {
  if (!study.sample_steps.empty()) return study.sample_steps;
  const int s = problem.s_index;
  const int span = time.nt - s;
  std::vector<int> out;
  for (int q = 1; q <= 4; ++q) {
    int k = s + (span * q) / 5;
    if (k <= s) k = s + 1;
    if (k >= time.nt) k = time.nt - 1;
    if (out.empty() || out.back() != k) out.push_back(k);
  }
  return out;
}

std::vector<int> ExperimentConfig::effective_p_eval_steps() const {
  if (!study.p_eval_steps.empty()) return study.p_eval_steps;
  std::vector<int> out = {problem.s_index};
  const int mid = problem.s_index + (time.nt - problem.s_index) / 2;
  if (mid != problem.s_index) out.push_back(mid);
  return out;
}

MaterialField build_materials(const ExperimentConfig& cfg) {
  GridDims dims{cfg.grid.nx, cfg.grid.ny};
  const auto& m = cfg.materials;
  MaterialField::ScalarField eps;
  if (m.eps_kind == "const") {
    eps = [v = m.eps_value](double, double) { return v; };
  } else {
    eps = [m](double x, double y) {
      const double dx = x - m.eps_center_x, dy = y - m.eps_center_y;
      return m.eps_value +
             m.eps_amplitude *
                 std::exp(-(dx * dx + dy * dy) / (2.0 * m.eps_width * m.eps_width));
    };
  }
  return MaterialField::from_functions(
      dims, eps, [v = m.mu_value](double, double) { return v; },
      [v = m.sigma_value](double, double) { return v; });
}

std::shared_ptr<const Propagator> build_propagator(const ExperimentConfig& cfg) {
  GridDims dims{cfg.grid.nx, cfg.grid.ny};
  auto ops = std::make_shared<const MaxwellOperators>(dims, build_materials(cfg),
                                                      cfg.boundary.kappa);
  return std::make_shared<const Propagator>(ops, TimeGrid(cfg.time.T, cfg.time.nt));
}

LqProblem build_problem(const ExperimentConfig& cfg,
                        std::shared_ptr<const Propagator> prop) {
  LqProblem prob;
  prob.prop = std::move(prop);
  prob.k_s = cfg.problem.s_index;
  prob.alpha = cfg.problem.alpha;
  prob.weight = cfg.problem.terminal_weight == "identity"
                    ? TerminalWeight::identity()
                    : TerminalWeight::resolvent_smoothed(cfg.problem.terminal_n);
  prob.cg = CgOptions{cfg.solver.cg_tol, cfg.solver.cg_max_iter};
  prob.validate();
  return prob;
}

namespace {

StateVector gaussian_state(const GridDims& dims, double cx, double cy, double width,
                           double amplitude, bool boundary_silent) {
  StateVector y(dims);
  for (int i = 0; i <= dims.nx; ++i) {
    for (int j = 0; j <= dims.ny; ++j) {
      const double x = i * dims.hx(), yy = j * dims.hy();
      double v = amplitude * std::exp(-((x - cx) * (x - cx) + (yy - cy) * (yy - cy)) /
                                      (2.0 * width * width));
      if (boundary_silent) {
        const double d = std::min(std::min(x, 1.0 - x), std::min(yy, 1.0 - yy));
        double mask = (d - 0.15) / 0.1;
        mask = std::clamp(mask, 0.0, 1.0);
        v *= mask * mask;
      }
      y.ez(i, j) = v;
    }
  }
  return y;
}

}  // namespace

StateVector build_initial_state(const ExperimentConfig& cfg, const GridDims& dims,
                                std::uint64_t seed_override) {
  const auto& s = cfg.initial_state;
  if (s.preset == "gaussian") {
    return gaussian_state(dims, s.center_x, s.center_y, s.width, s.amplitude, false);
  }
  if (s.preset == "boundary-silent") {
    return gaussian_state(dims, s.center_x, s.center_y, s.width, s.amplitude, true);
  }
  Rng rng(seed_override != 0 ? seed_override : s.seed);
  StateVector y(dims);
  for (int k = 0; k < y.data().size(); ++k) y.data()[k] = rng.normal();
  y.data() /= std::sqrt(y.data().squaredNorm());
  return y;
}

std::vector<StateVector> build_probes(const ExperimentConfig& cfg,
                                      const GridDims& dims, std::uint64_t seed) {
  std::vector<StateVector> probes;
  probes.reserve(cfg.study.num_probes);
  if (cfg.study.num_probes >= 1) {
    probes.push_back(gaussian_state(dims, 0.5, 0.5, 0.4, 1.0, false));
  }
  if (cfg.study.num_probes >= 2) {
    probes.push_back(gaussian_state(dims, 0.45, 0.5, 0.42, 1.0, false));
  }
  Rng rng(seed + 0x70726f62);
  while (static_cast<int>(probes.size()) < cfg.study.num_probes) {
    StateVector y(dims);
    for (int k = 0; k < y.data().size(); ++k) y.data()[k] = rng.normal();
    y.data() /= std::sqrt(y.data().squaredNorm());
    probes.push_back(std::move(y));
  }
  return probes;
}

}  // namespace mxlqr
