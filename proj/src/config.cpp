#include "superkrylov/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "superkrylov/csv.hpp"
#include "superkrylov/error.hpp"

namespace superkrylov::experiment {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

[[noreturn]] void parse_error(const std::string& key, const std::string& value,
                              const std::string& why) {
  throw Error(ErrorCode::ConfigParse, key + " = '" + value + "': " + why);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T out{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, out);
  if (text.empty() || res.ec != std::errc{} || res.ptr != last)
    parse_error(key, text, "not a valid number");
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split(value, ',')) out.push_back(parse_number<double>(key, item));
  if (out.empty()) parse_error(key, value, "empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& item : split(value, ',')) {
    const auto range = split(item, ':');
    if (range.size() == 1) {
      out.push_back(parse_number<int>(key, item));
    } else if (range.size() == 2 || range.size() == 3) {
      const int lo = parse_number<int>(key, range[0]);
      const int hi = parse_number<int>(key, range[1]);
      const int step = range.size() == 3 ? parse_number<int>(key, range[2]) : 1;
      if (step <= 0 || hi < lo) parse_error(key, item, "bad range");
      for (int x = lo; x <= hi; x += step) out.push_back(x);
    } else {
      parse_error(key, item, "bad range");
    }
  }
  if (out.empty()) parse_error(key, value, "empty list");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  parse_error(key, value, "expected true or false");
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>)
      out += format_double(xs[i]);
    else
      out += std::to_string(xs[i]);
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigParse, what); };
  if (c.model != "heisenberg" && c.model != "bipartite" && c.model != "random_hermitian")
    fail("model must be heisenberg, bipartite or random_hermitian");
  if (c.model == "bipartite" && c.n % 2 != 0) fail("bipartite model needs an even qubit count");
  if (c.n < 1) fail("n must be positive");
  for (double g : c.gamma0)
    if (!(g > 0.0) || g > 0.5) fail("gamma0 values must lie in (0, 0.5]");
  for (int m : c.m_values)
    if (m < 2) fail("m_values must be >= 2");
  for (double t : c.theta_values)
    if (!(t >= 0.0)) fail("theta_values must be >= 0");
  for (int d : c.D_values)
    if (d < 2) fail("D_values must be >= 2");
  if (c.M < 2) fail("M must be >= 2");
  if (!(c.delta_t_fraction > 0.0) || c.delta_t_fraction >= 1.0)
    fail("delta_t_fraction must lie in (0, 1)");
  if (c.t_star && !(*c.t_star > 0.0)) fail("t_star must be positive");
  if (c.trials < 1) fail("trials must be >= 1");
  if (c.pair_j < 0 || c.pair_k < 0 || c.pair_j == c.pair_k) fail("pair needs distinct j, k >= 0");
  if (c.demo_points < 2) fail("demo_points must be >= 2");
}

}  // namespace

std::string to_string(EpsRule rule, double value) {
  switch (rule) {
    case EpsRule::NoiseFree: return "noise_free";
    case EpsRule::MTheta: return "m_theta";
    case EpsRule::Fixed: return "fixed:" + format_double(value);
  }
  return "noise_free";
}

std::string to_string(PairMode mode) {
  switch (mode) {
    case PairMode::Auto: return "auto";
    case PairMode::Exact: return "exact";
    case PairMode::Minimax: return "minimax";
  }
  return "auto";
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"model", [&](auto&, auto& v) { c.model = v; }},
      {"n", [&](auto& k, auto& v) { c.n = parse_number<int>(k, v); }},
      {"coupling_seed", [&](auto& k, auto& v) { c.coupling_seed = parse_number<std::uint64_t>(k, v); }},
      {"state_seed", [&](auto& k, auto& v) { c.state_seed = parse_number<std::uint64_t>(k, v); }},
      {"gamma0", [&](auto& k, auto& v) { c.gamma0 = parse_double_list(k, v); }},
      {"m_values", [&](auto& k, auto& v) { c.m_values = parse_int_list(k, v); }},
      {"theta_values", [&](auto& k, auto& v) { c.theta_values = parse_double_list(k, v); }},
      {"D", [&](auto& k, auto& v) { c.D_values = parse_int_list(k, v); }},
      {"M", [&](auto& k, auto& v) { c.M = parse_number<int>(k, v); }},
      {"delta_t_fraction", [&](auto& k, auto& v) { c.delta_t_fraction = parse_number<double>(k, v); }},
      {"t_star", [&](auto& k, auto& v) { c.t_star = parse_number<double>(k, v); }},
      {"eps_rule",
       [&](auto& k, auto& v) {
         if (v == "noise_free") {
           c.eps_rule = EpsRule::NoiseFree;
         } else if (v == "m_theta") {
           c.eps_rule = EpsRule::MTheta;
         } else if (v.rfind("fixed:", 0) == 0) {
           c.eps_rule = EpsRule::Fixed;
           c.eps_value = parse_number<double>(k, v.substr(6));
           if (!(c.eps_value >= 0.0)) parse_error(k, v, "threshold must be >= 0");
         } else {
           parse_error(k, v, "expected noise_free, m_theta or fixed:<value>");
         }
       }},
      {"pair_mode",
       [&](auto& k, auto& v) {
         if (v == "auto") c.pair_mode = PairMode::Auto;
         else if (v == "exact") c.pair_mode = PairMode::Exact;
         else if (v == "minimax") c.pair_mode = PairMode::Minimax;
         else parse_error(k, v, "expected auto, exact or minimax");
       }},
      {"forcing",
       [&](auto& k, auto& v) {
         try {
           c.forcing = minimax::forcing_from_string(v);
         } catch (const Error&) {
           parse_error(k, v, "expected last_component or full_state");
         }
       }},
      {"exact_noise_budget", [&](auto& k, auto& v) { c.exact_noise_budget = parse_bool(k, v); }},
      {"trials", [&](auto& k, auto& v) { c.trials = parse_number<int>(k, v); }},
      {"master_seed", [&](auto& k, auto& v) { c.master_seed = parse_number<std::uint64_t>(k, v); }},
      {"pair",
       [&](auto& k, auto& v) {
         const auto ij = split(v, ',');
         if (ij.size() != 2) parse_error(k, v, "expected j,k");
         c.pair_j = parse_number<int>(k, ij[0]);
         c.pair_k = parse_number<int>(k, ij[1]);
       }},
      {"demo_points", [&](auto& k, auto& v) { c.demo_points = parse_number<int>(k, v); }},
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigParse, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw Error(ErrorCode::ConfigParse,
                  "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    it->second(key, value);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParse, "cannot open config file '" + path + "'");
  return parse_config(in);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  return {
      {"model", model},
      {"n", std::to_string(n)},
      {"coupling_seed", std::to_string(coupling_seed)},
      {"state_seed", std::to_string(state_seed)},
      {"gamma0", join(gamma0)},
      {"m_values", join(m_values)},
      {"theta_values", join(theta_values)},
      {"D", join(D_values)},
      {"M", std::to_string(M)},
      {"delta_t_fraction", format_double(delta_t_fraction)},
      {"t_star", t_star ? format_double(*t_star) : "auto"},
      {"eps_rule", to_string(eps_rule, eps_value)},
      {"pair_mode", to_string(pair_mode)},
      {"forcing", minimax::to_string(forcing)},
      {"exact_noise_budget", exact_noise_budget ? "true" : "false"},
      {"trials", std::to_string(trials)},
      {"master_seed", std::to_string(master_seed)},
      {"pair", std::to_string(pair_j) + "," + std::to_string(pair_k)},
      {"demo_points", std::to_string(demo_points)},
  };
}

}  // namespace superkrylov::experiment
