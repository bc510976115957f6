#include "heatsup/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "heatsup/errors.hpp"

namespace heatsup {

namespace {

const std::pair<ExperimentKind, const char*> kKinds[] = {
    {ExperimentKind::Identities, "identities"},
    {ExperimentKind::Regularity, "regularity"},
    {ExperimentKind::GrrCheck, "grr_check"},
    {ExperimentKind::DensityF, "density_f"},
    {ExperimentKind::DensityM0, "density_m0"},
    {ExperimentKind::Tails, "tails"},
    {ExperimentKind::WalshScaling, "walsh_scaling"},
    {ExperimentKind::Gamma22Moments, "gamma22_moments"},
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigurationError("key '" + key + "': not a number: " + v);
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto d = std::stoull(v, &used);
    if (used != v.size() || v.front() == '-') throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigurationError("key '" + key + "': not a nonnegative integer: " + v);
  }
}

int to_int(const std::string& key, const std::string& v) {
  const auto u = to_u64(key, v);
  if (u > 1u << 30) throw ConfigurationError("key '" + key + "': value too large");
  return static_cast<int>(u);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigurationError("key '" + key + "': expected true or false");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// One entry per key: how to read it into and write it out of a config.
struct Field {
  std::function<void(ExperimentConfig&, const std::string& key, const std::string&)> read;
  std::function<std::string(const ExperimentConfig&)> write;
};

template <class Get>
Field real(Get get) {
  return {[get](ExperimentConfig& c, const std::string& k, const std::string& v) { get(c) = to_double(k, v); },
          [get](const ExperimentConfig& c) { return fmt(get(const_cast<ExperimentConfig&>(c))); }};
}
template <class Get>
Field integer(Get get) {
  return {[get](ExperimentConfig& c, const std::string& k, const std::string& v) { get(c) = to_int(k, v); },
          [get](const ExperimentConfig& c) { return std::to_string(get(const_cast<ExperimentConfig&>(c))); }};
}
template <class Get>
Field u64(Get get) {
  return {[get](ExperimentConfig& c, const std::string& k, const std::string& v) {
            get(c) = static_cast<std::remove_reference_t<decltype(get(c))>>(to_u64(k, v));
          },
          [get](const ExperimentConfig& c) { return std::to_string(get(const_cast<ExperimentConfig&>(c))); }};
}

// Ordered (section, key) table; serialisation follows this order.
const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Field>>>>& schema() {
  using C = ExperimentConfig;
  static const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Field>>>> s = {
      {"model",
       {{"bc", Field{[](C& c, const std::string&, const std::string& v) { c.bc = boundary_from_string(v); },
                     [](const C& c) { return std::string(to_string(c.bc)); }}},
        {"T", real([](C& c) -> double& { return c.T; })}}},
      {"grid",
       {{"t_max", real([](C& c) -> double& { return c.grid.t_max; })},
        {"nt", integer([](C& c) -> int& { return c.grid.nt; })},
        {"nx", integer([](C& c) -> int& { return c.grid.nx; })}}},
      {"window",
       {{"s0", real([](C& c) -> double& { return c.window.s0; })},
        {"y0", real([](C& c) -> double& { return c.window.y0; })},
        {"delta1", real([](C& c) -> double& { return c.window.delta1; })},
        {"delta2", real([](C& c) -> double& { return c.window.delta2; })},
        {"I_lo", real([](C& c) -> double& { return c.window.I.lo; })},
        {"I_hi", real([](C& c) -> double& { return c.window.I.hi; })},
        {"J_lo", real([](C& c) -> double& { return c.window.J.lo; })},
        {"J_hi", real([](C& c) -> double& { return c.window.J.hi; })},
        {"c1", real([](C& c) -> double& { return c.window.c1; })},
        {"C1", real([](C& c) -> double& { return c.window.C1; })},
        {"c2", real([](C& c) -> double& { return c.window.c2; })},
        {"C2", real([](C& c) -> double& { return c.window.C2; })},
        {"Cbar1", real([](C& c) -> double& { return c.window.Cbar1; })}}},
      {"seminorm",
       {{"p0", integer([](C& c) -> int& { return c.seminorm.p0; })},
        {"gamma0", real([](C& c) -> double& { return c.seminorm.gamma0; })},
        {"rect_p0", integer([](C& c) -> int& { return c.rect.p0; })},
        {"rect_gamma0", real([](C& c) -> double& { return c.rect.gamma0; })},
        {"theta", real([](C& c) -> double& { return c.rect.theta; })},
        {"gamma1", real([](C& c) -> double& { return c.rect.gamma1; })},
        {"gamma2", real([](C& c) -> double& { return c.rect.gamma2; })}}},
      {"mc",
       {{"n_paths", u64([](C& c) -> std::uint64_t& { return c.mc.n_paths; })},
        {"seed", u64([](C& c) -> std::uint64_t& { return c.mc.seed; })},
        {"batch_size", u64([](C& c) -> std::uint64_t& { return c.mc.batch_size; })},
        {"threads", u64([](C& c) -> unsigned& { return c.mc.threads; })}}},
      {"experiment",
       {{"kind", Field{[](C& c, const std::string&, const std::string& v) { c.experiment = experiment_from_string(v); },
                       [](const C& c) { return std::string(to_string(c.experiment)); }}},
        {"deltas", Field{[](C& c, const std::string& k, const std::string& v) {
                           c.design.deltas.clear();
                           for (const auto& p : split(v, ',')) c.design.deltas.push_back(to_double(k, p));
                         },
                         [](const C& c) {
                           std::string s;
                           for (double d : c.design.deltas) s += (s.empty() ? "" : ", ") + fmt(d);
                           return s;
                         }}},
        {"m0_deltas", Field{[](C& c, const std::string& k, const std::string& v) {
                              c.design.m0_deltas.clear();
                              for (const auto& p : split(v, ',')) {
                                const auto ab = split(p, ':');
                                if (ab.size() != 2) throw ConfigurationError("key 'm0_deltas': expected delta1:delta2 pairs");
                                c.design.m0_deltas.push_back({to_double(k, ab[0]), to_double(k, ab[1])});
                              }
                            },
                            [](const C& c) {
                              std::string s;
                              for (const auto& d : c.design.m0_deltas)
                                s += (s.empty() ? "" : ", ") + fmt(d.delta1) + ":" + fmt(d.delta2);
                              return s;
                            }}},
        {"f_steps", integer([](C& c) -> int& { return c.design.f_steps; })},
        {"f_refine", integer([](C& c) -> int& { return c.design.f_refine; })},
        {"m0_time_steps", integer([](C& c) -> int& { return c.design.m0_time_steps; })},
        {"m0_time_refine", integer([](C& c) -> int& { return c.design.m0_time_refine; })},
        {"m0_space_steps", integer([](C& c) -> int& { return c.design.m0_space_steps; })},
        {"rect_time_steps", integer([](C& c) -> int& { return c.design.rect_time_steps; })},
        {"rect_space_steps", integer([](C& c) -> int& { return c.design.rect_space_steps; })},
        {"walsh_cells", integer([](C& c) -> int& { return c.design.walsh_cells; })},
        {"truncation", integer([](C& c) -> int& { return c.design.truncation; })},
        {"bootstrap", integer([](C& c) -> int& { return c.design.bootstrap; })},
        {"lattice", integer([](C& c) -> int& { return c.design.lattice; })},
        {"gamma22_extra_rounds", integer([](C& c) -> int& { return c.design.gamma22_extra_rounds; })}}},
      {"output",
       {{"dir", Field{[](C& c, const std::string&, const std::string& v) { c.output_dir = v; },
                      [](const C& c) { return c.output_dir; }}},
        {"retain_raw", Field{[](C& c, const std::string& k, const std::string& v) { c.retain_raw = to_bool(k, v); },
                             [](const C& c) { return std::string(c.retain_raw ? "true" : "false"); }}}}},
  };
  return s;
}

}  // namespace

const char* to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKinds)
    if (kind == k) return name;
  return "?";
}

ExperimentKind experiment_from_string(const std::string& s) {
  for (const auto& [kind, name] : kKinds)
    if (s == name) return kind;
  throw ConfigurationError("unknown experiment kind: " + s);
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return serialize(*this) == serialize(o);
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigurationError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& [name, keys] : schema()) known = known || name == section;
      if (!known) throw ConfigurationError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigurationError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigurationError("line " + std::to_string(lineno) + ": key outside any section");
    bool found = false;
    for (const auto& [name, keys] : schema()) {
      if (name != section) continue;
      for (const auto& [k, field] : keys) {
        if (k != key) continue;
        field.read(c, section + "." + key, value);
        found = true;
      }
    }
    if (!found) throw ConfigurationError("line " + std::to_string(lineno) + ": unknown key " + section + "." + key);
  }
  c.window.T = c.T;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigurationError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& c) {
  std::string out;
  for (const auto& [section, keys] : schema()) {
    if (!out.empty()) out += "\n";
    out += "[" + section + "]\n";
    for (const auto& [k, field] : keys) out += k + " = " + field.write(c) + "\n";
  }
  return out;
}

std::vector<ConstraintCheck> validate(const ExperimentConfig& c) {
  std::vector<ConstraintCheck> out;
  const auto add = [&](const std::string& prefix, const std::vector<ConstraintCheck>& v) {
    for (auto x : v) {
      x.name = prefix + x.name;
      out.push_back(x);
    }
  };
  const auto positive = [&](const std::string& name, double v) { out.push_back({name, 0.0, v, v > 0.0}); };
  positive("model: T > 0", c.T);
  positive("grid: nt > 0", c.grid.nt);
  positive("grid: nx > 0", c.grid.nx);
  out.push_back({"grid: dt <= dx^2/2", c.grid.dt(), 0.5 * c.grid.dx() * c.grid.dx() * (1.0 + 1e-12),
                 c.grid.fd_stable()});
  WindowConfig w = c.window;
  w.T = c.T;
  add("window F: ", check_window_F(w));
  add("window M0: ", check_window_M0(w));
  for (double d : c.design.deltas) {
    WindowConfig v = w;
    v.delta1 = d;
    add("F[delta1=" + fmt(d) + "]: ", check_window_F(v));
  }
  for (const auto& m : c.design.m0_deltas) {
    WindowConfig v = w;
    v.delta1 = m.delta1;
    v.delta2 = m.delta2;
    add("M0[delta1=" + fmt(m.delta1) + ", delta2=" + fmt(m.delta2) + "]: ", check_window_M0(v));
  }
  add("seminorm: ", check_seminorm(c.seminorm, false));
  add("seminorm rect: ", check_seminorm(c.rect, true));
  positive("mc: n_paths > 0", static_cast<double>(c.mc.n_paths));
  positive("mc: batch_size > 0", static_cast<double>(c.mc.batch_size));
  positive("mc: threads > 0", c.mc.threads);
  positive("design: f_steps > 0", c.design.f_steps);
  out.push_back({"design: f_refine >= 16", 16.0, static_cast<double>(c.design.f_refine) + 1.0, c.design.f_refine >= 16});
  positive("design: walsh_cells > 0", c.design.walsh_cells);
  positive("design: truncation > 0", c.design.truncation);
  out.push_back({"design: lattice >= 3", 3.0, static_cast<double>(c.design.lattice) + 1.0, c.design.lattice >= 3});
  const bool scaling = c.experiment == ExperimentKind::DensityF || c.experiment == ExperimentKind::Tails ||
                       c.experiment == ExperimentKind::WalshScaling || c.experiment == ExperimentKind::Gamma22Moments ||
                       c.experiment == ExperimentKind::GrrCheck;
  if (scaling) {
    out.push_back({"design: at least three delta1 values", 3.0, static_cast<double>(c.design.deltas.size()) + 1.0,
                   c.design.deltas.size() >= 3});
  }
  if (c.experiment == ExperimentKind::DensityF || c.experiment == ExperimentKind::DensityM0) {
    out.push_back({"mc: n_paths >= 100000 for density bounds", 100000.0, static_cast<double>(c.mc.n_paths) + 1.0,
                   c.mc.n_paths >= 100000});
  }
  if (c.experiment == ExperimentKind::DensityM0 || c.experiment == ExperimentKind::Tails ||
      c.experiment == ExperimentKind::GrrCheck) {
    out.push_back({"design: at least three M0 configurations", 3.0,
                   static_cast<double>(c.design.m0_deltas.size()) + 1.0, c.design.m0_deltas.size() >= 3});
  }
  return out;
}

bool all_pass(const std::vector<ConstraintCheck>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace heatsup
