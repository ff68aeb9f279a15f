#include "helios/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>

#include "helios/errors.hpp"

namespace helios::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(trim(current));
  return parts;
}

double parse_factor(const std::string& token, const std::string& whole) {
  if (token == "pi") return std::numbers::pi;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number '" + whole + "'");
  }
  if (used != token.size()) throw ConfigError("cannot parse number '" + whole + "'");
  return value;
}

std::vector<double> parse_args(const std::string& args, std::size_t min_count,
                               std::size_t max_count, const std::string& spec) {
  std::vector<double> out;
  if (!trim(args).empty())
    for (const auto& part : split(args, ',')) out.push_back(parse_number(part));
  if (out.size() < min_count || out.size() > max_count)
    throw ConfigError("wrong number of arguments in function spec '" + spec + "'");
  return out;
}

std::function<double(double)> table_function(const std::filesystem::path& file,
                                             const std::string& spec) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open table file '" + file.string() + "' in '" + spec + "'");
  std::vector<std::pair<double, double>> points;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0.0;
    double y = 0.0;
    if (!(row >> x >> y)) {
      if (points.empty()) continue;  // header
      throw ConfigError("malformed row in table file '" + file.string() + "'");
    }
    points.emplace_back(x, y);
  }
  if (points.empty()) throw ConfigError("table file '" + file.string() + "' has no rows");
  std::sort(points.begin(), points.end());
  return [points](double x) {
    if (x <= points.front().first) return points.front().second;
    if (x >= points.back().first) return points.back().second;
    const auto hi = std::upper_bound(points.begin(), points.end(), std::make_pair(x, -INFINITY),
                                     [](const auto& a, const auto& b) { return a.first < b.first; });
    const auto lo = hi - 1;
    const double s = (x - lo->first) / (hi->first - lo->first);
    return lo->second + s * (hi->second - lo->second);
  };
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long parsed = 0;
  try {
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    parsed = std::stoull(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' needs a non-negative integer, got '" + value + "'");
  }
  if (used != value.size())
    throw ConfigError("key '" + key + "' needs a non-negative integer, got '" + value + "'");
  return parsed;
}

}  // namespace

double parse_number(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty numeric argument");
  double value = 1.0;
  char op = '*';
  std::string token;
  auto apply = [&] {
    const double factor = parse_factor(trim(token), s);
    value = op == '*' ? value * factor : value / factor;
    token.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    // '*' or '/' split factors; an exponent sign like 1e-3 stays in the token.
    if ((c == '*' || c == '/') && !token.empty()) {
      apply();
      op = c;
    } else {
      token += c;
    }
  }
  apply();
  return value;
}

FunctionSpec parse_function(const std::string& text, const std::filesystem::path& base_dir) {
  const std::string spec = trim(text);
  const auto open = spec.find('(');
  if (open == std::string::npos || spec.back() != ')')
    throw ConfigError("function spec must look like name(args), got '" + spec + "'");
  const std::string name = trim(spec.substr(0, open));
  const std::string args = spec.substr(open + 1, spec.size() - open - 2);
  FunctionSpec out{spec, {}};

  if (name == "const") {
    const double c = parse_args(args, 1, 1, spec)[0];
    out.fn = [c](double) { return c; };
  } else if (name == "power") {
    const double p = parse_args(args, 1, 1, spec)[0];
    out.fn = [p](double x) { return std::pow(x, p); };
  } else if (name == "sin") {
    const double k = parse_args(args, 1, 1, spec)[0];
    out.fn = [k](double x) { return std::sin(k * x); };
  } else if (name == "hat") {
    const auto v = parse_args(args, 3, 4, spec);
    const double r1 = v[0], r2 = v[1], r3 = v[2];
    const double peak = v.size() > 3 ? v[3] : 1.0;
    if (!(r1 < r2 && r2 < r3)) throw ConfigError("hat needs r1 < r2 < r3 in '" + spec + "'");
    out.fn = [=](double x) {
      if (x <= r1 || x > r3) return 0.0;
      if (x <= r2) return peak * (x - r1) / (r2 - r1);
      return peak * (r3 - x) / (r3 - r2);
    };
  } else if (name == "box") {
    const auto v = parse_args(args, 2, 3, spec);
    const double r1 = v[0], r2 = v[1];
    const double level = v.size() > 2 ? v[2] : 1.0;
    if (!(r1 < r2)) throw ConfigError("box needs r1 < r2 in '" + spec + "'");
    out.fn = [=](double x) { return (x > r1 && x <= r2) ? level : 0.0; };
  } else if (name == "table") {
    std::filesystem::path file = trim(args);
    if (file.empty()) throw ConfigError("table needs a file name in '" + spec + "'");
    if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
    out.fn = table_function(file, spec);
  } else {
    throw ConfigError("unknown function '" + name + "' in spec '" + spec + "'");
  }
  return out;
}

std::optional<Command> parse_command(const std::string& name) {
  static const std::map<std::string, Command> commands{
      {"forward", Command::forward},         {"ensemble", Command::ensemble},
      {"reconstruct", Command::reconstruct}, {"probe-decay", Command::probe_decay},
      {"sweep-h", Command::sweep_h}};
  const auto it = commands.find(name);
  if (it == commands.end()) return std::nullopt;
  return it->second;
}

const char* to_string(Command command) {
  switch (command) {
    case Command::forward: return "forward";
    case Command::ensemble: return "ensemble";
    case Command::reconstruct: return "reconstruct";
    case Command::probe_decay: return "probe-decay";
    case Command::sweep_h: return "sweep-h";
  }
  return "?";
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  bool probe_last_set = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config line " << line_no << " is not 'key = value': " << line;
      throw ConfigError(msg.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto real = [&] { return parse_number(value); };
    auto count = [&] { return static_cast<std::size_t>(parse_unsigned(key, value)); };

    if (key == "R0") cfg.radius = real();
    else if (key == "T") cfg.t_final = real();
    else if (key == "M") cfg.time_steps = count();
    else if (key == "N") cfg.radial_intervals = count();
    else if (key == "N1") cfg.modes = count();
    else if (key == "P") cfg.paths = count();
    else if (key == "H") cfg.hurst = real();
    else if (key == "epsilon") cfg.epsilon = real();
    else if (key == "seed") cfg.seed = parse_unsigned(key, value);
    else if (key == "noise_seed") cfg.noise_seed = parse_unsigned(key, value);
    else if (key == "solver") {
      if (value == "fd") cfg.solver = ensemble::Solver::fd;
      else if (value == "mild") cfg.solver = ensemble::Solver::mild;
      else throw ConfigError("solver must be 'fd' or 'mild', got '" + value + "'");
    }
    else if (key == "a") cfg.a_spec = value;
    else if (key == "f") cfg.f_spec = value;
    else if (key == "g") cfg.g_spec = value;
    else if (key == "h") cfg.h_spec = value;
    else if (key == "H_list") {
      cfg.hurst_list.clear();
      for (const auto& part : split(value, ',')) cfg.hurst_list.push_back(parse_number(part));
    }
    else if (key == "seeds") {
      cfg.seeds.clear();
      for (const auto& part : split(value, ',')) cfg.seeds.push_back(parse_unsigned(key, part));
    }
    else if (key == "probe_n_first") cfg.probe_first = count();
    else if (key == "probe_n_last") { cfg.probe_last = count(); probe_last_set = true; }
    else if (key == "kernel_quad_steps") cfg.kernel.quad_steps = count();
    else if (key == "kernel_cells") cfg.kernel.cells = count();
    else if (key == "kernel_mc_paths") cfg.kernel.mc_paths = count();
    else if (key == "kernel_mc_steps") cfg.kernel.mc_steps = count();
    else if (key == "kernel_mc_seed") cfg.kernel.mc_seed = parse_unsigned(key, value);
    else if (key == "kernel_mc_tolerance") cfg.kernel.mc_rel_tolerance = real();
    else throw ConfigError("unknown config key '" + key + "'");
  }
  if (!probe_last_set) cfg.probe_last = cfg.modes;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

std::vector<std::string> validate(const ExperimentConfig& c, Command command) {
  auto fail = [](const std::string& what) { throw ConfigError("config invariant violated: " + what); };
  if (!(c.radius > 0.0) || !std::isfinite(c.radius)) fail("R0 > 0");
  if (!(c.t_final > 0.0) || !std::isfinite(c.t_final)) fail("T > 0");
  if (c.time_steps < 1) fail("M >= 1");
  if (c.radial_intervals < 2) fail("N >= 2");
  if (c.radial_intervals % 2 != 0) fail("N even (composite Simpson)");
  if (!(c.hurst > 0.0 && c.hurst < 1.0)) fail("0 < H < 1");
  if (c.modes < 1) fail("N1 >= 1");
  if (!(c.epsilon >= 0.0) || !std::isfinite(c.epsilon)) fail("epsilon >= 0");
  const bool needs_paths = command == Command::ensemble || command == Command::reconstruct ||
                           command == Command::sweep_h;
  if (needs_paths && c.paths < 2) fail("P >= 2");
  if (c.kernel.quad_steps == 0 || c.kernel.quad_steps % 2 != 0) fail("kernel_quad_steps even");
  if (command == Command::sweep_h) {
    if (c.hurst_list.empty()) fail("H_list non-empty");
    for (double h : c.hurst_list)
      if (!(h > 0.0 && h < 1.0)) fail("0 < H < 1 for every H_list entry");
  }
  if (command == Command::probe_decay && !(c.probe_first >= 1 && c.probe_last > c.probe_first))
    fail("1 <= probe_n_first < probe_n_last");

  for (const auto* spec : {&c.a_spec, &c.f_spec, &c.g_spec, &c.h_spec})
    (void)parse_function(*spec, c.base_dir);

  std::vector<std::string> warnings;
  const std::size_t top = command == Command::probe_decay ? c.probe_last : c.modes;
  if (3 * top > c.radial_intervals) {
    std::ostringstream msg;
    msg << "N1 = " << top << " exceeds N/3 = " << c.radial_intervals / 3
        << "; Simpson resolution of high modes degrades";
    warnings.push_back(msg.str());
  }
  return warnings;
}

forward::DiffusionProblem make_problem(const ExperimentConfig& config) {
  forward::DiffusionProblem problem;
  problem.a = parse_function(config.a_spec, config.base_dir).fn;
  problem.f = parse_function(config.f_spec, config.base_dir).fn;
  problem.g = parse_function(config.g_spec, config.base_dir).fn;
  problem.h = parse_function(config.h_spec, config.base_dir).fn;
  problem.radius = config.radius;
  problem.t_final = config.t_final;
  return problem;
}

}  // namespace helios::cli
