#include "krotov/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "krotov/io.hpp"

namespace krotov {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// JSON object whose keys are checked off as they are read; leftovers are unknown keys.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ConfigError("config: '" + (path_.empty() ? std::string("<root>") : path_) +
                        "' must be an object");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& at(const std::string& key) {
    if (!has(key)) {
      throw ConfigError("config: missing required key '" + name(key) + "'");
    }
    return j_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) {
      if (!fallback) {
        throw ConfigError("config: missing required key '" + name(key) + "'");
      }
      return *fallback;
    }
    const json& v = j_.at(key);
    if (!v.is_number()) {
      throw ConfigError("config: '" + name(key) + "' must be a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      throw ConfigError("config: '" + name(key) + "' must be finite");
    }
    return x;
  }

  long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) {
    if (!has(key)) {
      if (!fallback) {
        throw ConfigError("config: missing required key '" + name(key) + "'");
      }
      return *fallback;
    }
    const json& v = j_.at(key);
    if (v.is_number_integer()) {
      return v.get<long long>();
    }
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) {
        return static_cast<long long>(x);
      }
    }
    throw ConfigError("config: '" + name(key) + "' must be an integer");
  }

  std::string text(const std::string& key, const std::string& fallback,
                   std::initializer_list<const char*> choices) {
    if (!has(key)) {
      return fallback;
    }
    const json& v = j_.at(key);
    if (!v.is_string()) {
      throw ConfigError("config: '" + name(key) + "' must be a string");
    }
    std::string s = v.get<std::string>();
    if (choices.size() > 0 &&
        std::none_of(choices.begin(), choices.end(), [&](const char* c) { return s == c; })) {
      std::string list;
      for (const char* c : choices) {
        list += (list.empty() ? "" : ", ") + std::string(c);
      }
      throw ConfigError("config: '" + name(key) + "' must be one of " + list + " (got '" + s +
                        "')");
    }
    return s;
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) {
      return fallback;
    }
    const json& v = j_.at(key);
    if (!v.is_boolean()) {
      throw ConfigError("config: '" + name(key) + "' must be true or false");
    }
    return v.get<bool>();
  }

  Section section(const std::string& key) {
    static const json empty = json::object();
    return Section(has(key) ? j_.at(key) : empty, name(key));
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) {
      throw ConfigError("config: '" + name(key) + "' must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) {
        throw ConfigError("config: '" + name(key) + "' must be an array of numbers");
      }
      out.push_back(x.get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (seen_.count(key) == 0) {
        throw ConfigError("config: unknown key '" + name(key) + "'");
      }
    }
  }

  std::string name(const std::string& key) const { return join(path_, key); }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw ConfigError("config: " + message);
  }
}

std::string resolve(const std::string& base_dir, const std::string& file) {
  const std::filesystem::path p(file);
  return p.is_absolute() ? file : (std::filesystem::path(base_dir) / p).string();
}

std::pair<int, int> level_pair(Section& s, const std::string& key, std::pair<int, int> fallback) {
  if (!s.has(key)) {
    return fallback;
  }
  const auto v = s.numbers(key);
  require(v.size() == 2, "'" + s.name(key) + "' must be [surface, level]");
  return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

void parse_model(Section m, RunConfig& c) {
  c.model_type = m.text("type", "", {"tls", "lambda", "spin_spin", "fourier_grid"});
  require(!c.model_type.empty(), "missing required key 'model.type'");

  if (c.model_type == "tls") {
    c.tls_omega = m.number("omega", 1.0);
    const auto target = m.text("target", "state_transfer", {"state_transfer", "hadamard"});
    c.tls_target = target == "hadamard" ? TlsTarget::hadamard : TlsTarget::state_transfer;
  } else if (c.model_type == "lambda") {
    if (m.has("energies")) {
      const auto e = m.numbers("energies");
      require(e.size() == 3, "'model.energies' must hold three numbers");
      c.lambda.energies = Eigen::Map<const RealVector>(e.data(), 3);
    }
    c.lambda.mu01 = m.number("mu01", 1.0);
    c.lambda.mu12 = m.number("mu12", 1.0);
    const auto f = m.integer("forbidden_index", 2);
    require(f >= 0 && f <= 2, "'model.forbidden_index' must be 0, 1 or 2");
    c.lambda.forbidden_index = static_cast<Eigen::Index>(f);
  } else if (c.model_type == "spin_spin") {
    c.spin_hbar = m.number("hbar", 1.0);
    require(c.spin_hbar > 0.0, "'model.hbar' must be > 0");
    const bool inline_tensor = m.has("tensor");
    const bool file_tensor = m.has("tensor_file");
    require(inline_tensor != file_tensor,
            "'model' needs exactly one of 'tensor' and 'tensor_file'");
    std::vector<std::vector<double>> rows;
    if (inline_tensor) {
      const json& t = m.at("tensor");
      require(t.is_array(), "'model.tensor' must be a 4 x 4 array");
      for (const auto& row : t) {
        require(row.is_array(), "'model.tensor' must be a 4 x 4 array");
        std::vector<double> r;
        for (const auto& x : row) {
          require(x.is_number(), "'model.tensor' entries must be numbers");
          r.push_back(x.get<double>());
        }
        rows.push_back(r);
      }
    } else {
      const json& f = m.at("tensor_file");
      require(f.is_string(), "'model.tensor_file' must be a path");
      rows = io::read_table_file(resolve(c.base_dir, f.get<std::string>()));
    }
    require(rows.size() == 4 && std::all_of(rows.begin(), rows.end(),
                                            [](const auto& r) { return r.size() == 4; }),
            "spin-spin tensor must be 4 x 4");
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        c.spin_tensor(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
    require((c.spin_tensor - c.spin_tensor.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
            "spin-spin tensor must be symmetric");
    const auto target = m.text("target", "state_transfer", {"state_transfer", "b_gate"});
    c.spin_target = target == "b_gate" ? SpinTarget::b_gate : SpinTarget::state_transfer;
  } else {
    const bool from_file = m.has("potential_file");
    const bool harmonic = m.has("harmonic");
    require(from_file != harmonic,
            "'model' needs exactly one of 'potential_file' and 'harmonic'");
    if (from_file) {
      const json& f = m.at("potential_file");
      require(f.is_string(), "'model.potential_file' must be a path");
      c.fourier = read_potential_file(resolve(c.base_dir, f.get<std::string>()));
    } else {
      Section h = m.section("harmonic");
      const auto n_r = h.integer("n_r", 64);
      require(n_r >= 2 && (n_r & (n_r - 1)) == 0, "'model.harmonic.n_r' must be a power of two");
      c.fourier.x_min = h.number("x_min", -10.0);
      c.fourier.length = h.number("length", 20.0);
      require(c.fourier.length > 0.0, "'model.harmonic.length' must be > 0");
      const auto omega = h.numbers("omega");
      std::vector<double> shift(omega.size(), 0.0);
      std::vector<double> offset(omega.size(), 0.0);
      if (h.has("shift")) {
        shift = h.numbers("shift");
      }
      if (h.has("offset")) {
        offset = h.numbers("offset");
      }
      require(!omega.empty() && shift.size() == omega.size() && offset.size() == omega.size(),
              "'model.harmonic' omega, shift and offset need one entry per surface");
      h.finish();
      const RealVector x =
          fourier_points(static_cast<std::size_t>(n_r), c.fourier.x_min, c.fourier.length);
      c.fourier.potentials.clear();
      for (std::size_t s = 0; s < omega.size(); ++s) {
        const auto d = (x.array() - shift[s]);
        c.fourier.potentials.push_back((0.5 * omega[s] * omega[s] * d * d + offset[s]).matrix());
      }
    }
    c.fourier.mass = m.number("mass", 1.0);
    require(c.fourier.mass > 0.0, "'model.mass' must be > 0");
    c.fourier.mu = m.number("mu", 1.0);
    c.fourier.hbar = m.number("hbar", 1.0);
    require(c.fourier.hbar > 0.0, "'model.hbar' must be > 0");
    c.fourier.initial = level_pair(m, "initial", {0, 0});
    c.fourier.target = level_pair(m, "target", {1, 0});
  }
  m.finish();
}

}  // namespace

RunConfig parse_config(const json& j, const std::string& base_dir) {
  RunConfig c;
  c.raw = j;
  c.base_dir = base_dir;
  Section root(j, "");

  const auto version = root.integer("schema_version");
  require(version == 1, "'schema_version' must be 1 (got " + std::to_string(version) + ")");

  parse_model(root.section("model"), c);

  {
    Section f = root.section("functional");
    c.functional_type = f.text("type", "jt_sm", {"jt_sm", "jt_re", "jt_power"});
    c.lambda0 = f.number("lambda0", 1.0);
    require(c.lambda0 > 0.0, "'functional.lambda0' must be > 0");
    const auto p = f.integer("p", 2);
    require(p >= 1, "'functional.p' must be >= 1");
    c.power = static_cast<int>(p);
    const auto samples = f.integer("curvature_samples", 2000);
    require(samples >= 1, "'functional.curvature_samples' must be >= 1");
    c.curvature_samples = static_cast<std::size_t>(samples);
    c.curvature_safety = f.number("curvature_safety", 1.5);
    require(c.curvature_safety > 0.0, "'functional.curvature_safety' must be > 0");
    if (f.has("curvature_override")) {
      c.curvature_override = f.number("curvature_override");
    }
    f.finish();
  }
  {
    Section r = root.section("running_cost");
    c.lambda_a = r.number("lambda_a", 1.0);
    require(c.lambda_a > 0.0, "'running_cost.lambda_a' must be > 0");
    c.shape = r.text("shape", "sin2", {"sin2", "flat"});
    c.lambda_b = r.number("lambda_b", 0.0);
    c.running_operator = r.text("D", "auto", {"auto", "allowed", "forbidden", "identity"});
    if (c.model_type != "lambda") {
      require(c.running_operator != "allowed" && c.running_operator != "forbidden",
              "'running_cost.D' = allowed/forbidden needs the lambda model");
      require(c.lambda_b == 0.0 || c.running_operator == "identity",
              "'running_cost.lambda_b' != 0 needs 'running_cost.D' = identity for model " +
                  c.model_type);
    }
    r.finish();
  }
  {
    Section g = root.section("grid");
    c.final_time = g.number("T");
    require(c.final_time > 0.0, "'grid.T' must be > 0");
    const auto n = g.integer("n_steps");
    require(n >= 1, "'grid.n_steps' must be >= 1");
    c.n_steps = static_cast<std::size_t>(n);
    g.finish();
  }
  {
    Section g = root.section("guess");
    c.guess_amplitude = g.number("amplitude", 0.0);
    c.guess_frequency = g.number("frequency", 0.0);
    require(c.guess_amplitude >= 0.0, "'guess.amplitude' must be >= 0");
    require(c.guess_frequency >= 0.0, "'guess.frequency' must be >= 0");
    g.finish();
  }
  {
    Section s = root.section("sigma");
    auto& sp = c.options.sigma;
    sp.mode = parse_sigma_mode(s.text("mode", "off", {"off", "fixed", "analytic", "numeric"}));
    sp.A_bar = s.number("A_bar", 0.0);
    sp.B_bar = s.number("B_bar", 0.0);
    sp.C_bar = s.number("C_bar", 0.0);
    sp.eps_A = s.number("eps_A", 0.0);
    sp.eps_B = s.number("eps_B", 0.0);
    sp.eps_C = s.number("eps_C", 0.0);
    require(sp.eps_A >= 0.0, "'sigma.eps_A' must be >= 0");
    require(sp.eps_B >= 0.0, "'sigma.eps_B' must be >= 0");
    require(sp.eps_C >= 0.0, "'sigma.eps_C' must be >= 0");
    c.options.numeric_unclipped = s.flag("numeric_unclipped", false);
    Section seed = s.section("numeric_seed");
    c.options.numeric_seed = {seed.number("A", 0.0), seed.number("B", 0.0), seed.number("C", 0.0)};
    seed.finish();
    s.finish();
  }
  {
    Section s = root.section("stopping");
    const auto max_iter = s.integer("max_iter", 100);
    require(max_iter >= 0, "'stopping.max_iter' must be >= 0");
    c.options.max_iter = static_cast<std::size_t>(max_iter);
    c.options.J_tol = s.number("J_tol", 0.0);
    require(c.options.J_tol >= 0.0, "'stopping.J_tol' must be >= 0");
    s.finish();
  }
  {
    Section o = root.section("options");
    c.options.monotonic_guard = o.flag("monotonic_guard", true);
    const auto sweeps = o.integer("fixed_point_sweeps", 1);
    require(sweeps >= 0, "'options.fixed_point_sweeps' must be >= 0");
    c.options.fixed_point_sweeps = static_cast<std::size_t>(sweeps);
    c.options.source_mode = o.text("source_mode", "constant", {"constant", "linear"}) == "linear"
                                ? SourceMode::linear
                                : SourceMode::constant;
    c.options.track_analytic_C = o.flag("track_analytic_C", false);
    o.finish();
  }
  {
    Section o = root.section("output");
    c.convergence_file = o.text("convergence", c.convergence_file, {});
    c.field_file = o.text("field", c.field_file, {});
    c.overlaps_file = o.text("overlaps", c.overlaps_file, {});
    o.finish();
  }
  const auto seed = root.integer("seed", 20100401);
  require(seed >= 0, "'seed' must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  root.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open '" + path + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(j, dir.empty() ? "." : dir.string());
}

const std::vector<std::string>& scannable_parameters() {
  static const std::vector<std::string> names = {
      "running_cost.lambda_a", "running_cost.lambda_b", "sigma.A_bar",      "sigma.B_bar",
      "sigma.C_bar",           "sigma.eps_A",           "sigma.eps_B",      "sigma.eps_C",
      "functional.lambda0",    "functional.p",          "grid.T",           "grid.n_steps",
      "guess.amplitude",       "guess.frequency",       "model.omega",      "stopping.max_iter",
      "stopping.J_tol"};
  return names;
}

json with_parameter(const json& j, const std::string& path, double value) {
  const auto& names = scannable_parameters();
  if (std::find(names.begin(), names.end(), path) == names.end()) {
    throw ConfigError("scan: parameter '" + path + "' is not scannable");
  }
  const auto dot = path.find('.');
  const std::string outer = path.substr(0, dot);
  const std::string inner = path.substr(dot + 1);
  json out = j;
  if (!out.contains(outer) || out[outer].is_null()) {
    out[outer] = json::object();
  }
  const bool integral = path == "functional.p" || path == "grid.n_steps" ||
                        path == "stopping.max_iter";
  if (integral) {
    if (value != std::floor(value)) {
      throw ConfigError("scan: parameter '" + path + "' takes integer values");
    }
    out[outer][inner] = static_cast<long long>(value);
  } else {
    out[outer][inner] = value;
  }
  return out;
}

Problem build_problem(const RunConfig& c) {
  ModelParts parts;
  if (c.model_type == "tls") {
    parts = make_tls(c.tls_omega, c.tls_target);
  } else if (c.model_type == "lambda") {
    LambdaParams lp = c.lambda;
    lp.lambda_b = c.lambda_b;
    lp.choice = c.running_operator == "allowed"     ? SubspaceChoice::allowed
                : c.running_operator == "forbidden" ? SubspaceChoice::forbidden
                                                    : SubspaceChoice::automatic;
    parts = make_lambda(lp);
  } else if (c.model_type == "spin_spin") {
    parts = make_spin_spin(c.spin_tensor, c.spin_hbar, c.spin_target);
  } else if (c.model_type == "fourier_grid") {
    parts = make_fourier_grid(c.fourier);
  } else {
    throw ConfigError("config: unknown model type '" + c.model_type + "'");
  }
  if (c.running_operator == "identity") {
    const auto dim = parts.hamiltonian->dim();
    parts.running_operator = DenseOperator(Matrix::Identity(dim, dim), true);
    parts.lambda_b = c.lambda_b;
  }

  std::shared_ptr<const FinalTimeFunctional> functional;
  if (c.functional_type == "jt_sm") {
    functional = std::make_shared<JtSm>(c.lambda0);
  } else if (c.functional_type == "jt_re") {
    functional = std::make_shared<JtRe>(c.lambda0);
  } else {
    CurvatureSampling sampling;
    sampling.samples = c.curvature_samples;
    sampling.safety_factor = c.curvature_safety;
    sampling.seed = c.seed;
    sampling.override_value = c.curvature_override;
    functional = std::make_shared<JtPower>(c.lambda0, c.power, sampling);
  }

  const TimeGrid grid(c.n_steps, c.final_time);
  ControlField guess = build_guess_field(grid, c.guess_amplitude, c.guess_frequency, c.lambda_a);
  if (c.shape == "flat") {
    guess.shape = RealVector::Ones(guess.values.size());
  }
  return assemble(parts, functional, grid, guess);
}

std::string describe(const RunConfig& c, const Problem& p) {
  std::ostringstream out;
  out << "problem      " << p.name << " (model " << c.model_type << ")\n"
      << "dimension    " << p.hamiltonian->dim() << ", N = " << p.n_states() << "\n"
      << "functional   " << p.functional->name() << ", lambda0 = " << p.functional->lambda0();
  if (c.functional_type == "jt_power") {
    out << ", p = " << c.power;
  }
  out << "\n"
      << "grid         T = " << p.grid.final_time() << ", n_steps = " << p.grid.n_steps() << "\n"
      << "guess        amplitude = " << c.guess_amplitude << ", frequency = " << c.guess_frequency
      << ", shape = " << c.shape << "\n"
      << "costs        lambda_a = " << c.lambda_a << ", lambda_b = "
      << (p.cost.active() ? p.cost.lambda_b() : 0.0) << "\n"
      << "sigma        " << to_string(c.options.sigma.mode) << "\n"
      << "stopping     max_iter = " << c.options.max_iter << ", J_tol = " << c.options.J_tol
      << "\n";
  const auto flags = p.hamiltonian->flags();
  out << "hamiltonian  " << (flags.hermitian ? "hermitian" : "non-hermitian") << ", "
      << (flags.linear_in_field ? "linear" : "nonlinear") << " in the field\n";
  return out.str();
}

}  // namespace krotov
