#include "astar/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "astar/errors.hpp"

namespace astar {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  return v;
}

template <class Int>
Int to_int(const std::string& s) {
  Int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::string choose(const std::string& s,
                   std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (s == a) return s;
  }
  std::string msg = "expected one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw std::invalid_argument(msg + ", got '" + s + "'");
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Get>
Key real(std::string name, Get ref) {
  return {name,
          [ref](RunConfig& c, const std::string& v) { ref(c) = to_double(v); },
          [ref](const RunConfig& c) {
            return fmt(ref(c));
          }};
}

template <class Int, class Get>
Key integer(std::string name, Get ref) {
  return {name,
          [ref](RunConfig& c, const std::string& v) { ref(c) = to_int<Int>(v); },
          [ref](const RunConfig& c) {
            return std::to_string(ref(c));
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      real("units.c", [](auto& c) -> auto& { return c.solver.k.c; }),
      real("units.G", [](auto& c) -> auto& { return c.solver.k.G; }),
      {"eos.kind",
       [](RunConfig& c, const std::string& v) {
         c.solver.eos.kind = choose(v, {"polytrope", "dust"}) == "dust"
                                 ? EosKind::dust
                                 : EosKind::barotropic;
       },
       [](const RunConfig& c) -> std::string {
         return c.solver.eos.kind == EosKind::dust ? "dust" : "polytrope";
       }},
      real("eos.gamma",
           [](auto& c) -> auto& { return c.solver.eos.gamma; }),
      real("eos.A", [](auto& c) -> auto& { return c.solver.eos.Acoef; }),
      {"eos.upsilon_coeffs",
       [](RunConfig& c, const std::string& v) {
         c.solver.eos.upsilon.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           c.solver.eos.upsilon.push_back(to_double(trim(item)));
         }
       },
       [](const RunConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.solver.eos.upsilon.size(); ++i) {
           if (i) out += ", ";
           out += fmt(c.solver.eos.upsilon[i]);
         }
         return out;
       }},
      real("omega.value",
           [](auto& c) -> auto& { return c.solver.omega.value; }),
      real("omega.length",
           [](auto& c) -> auto& { return c.solver.omega.length; }),
      real("grid.wmax",
           [](auto& c) -> auto& { return c.solver.grid.wmax; }),
      real("grid.zmax",
           [](auto& c) -> auto& { return c.solver.grid.zmax; }),
      integer<int>("grid.nw",
                   [](auto& c) -> auto& { return c.solver.grid.nw; }),
      integer<int>("grid.nz",
                   [](auto& c) -> auto& { return c.solver.grid.nz; }),
      {"solver.frame",
       [](RunConfig& c, const std::string& v) {
         c.solver.frame = choose(v, {"rest", "corotating"}) == "corotating"
                              ? Frame::primed
                              : Frame::unprimed;
       },
       [](const RunConfig& c) -> std::string {
         return c.solver.frame == Frame::primed ? "corotating" : "rest";
       }},
      real("solver.theta",
           [](auto& c) -> auto& { return c.solver.theta; }),
      real("solver.relaxation",
           [](auto& c) -> auto& { return c.solver.relaxation; }),
      real("solver.tol_outer",
           [](auto& c) -> auto& { return c.solver.tol_outer; }),
      integer<int>("solver.max_outer",
                   [](auto& c) -> auto& { return c.solver.max_outer; }),
      {"solver.inner",
       [](RunConfig& c, const std::string& v) {
         c.solver.inner = choose(v, {"direct", "sor"}) == "sor"
                              ? InnerSolver::sor
                              : InnerSolver::direct;
       },
       [](const RunConfig& c) -> std::string {
         return c.solver.inner == InnerSolver::sor ? "sor" : "direct";
       }},
      integer<int>("solver.sor_sweeps",
                   [](auto& c) -> auto& { return c.solver.sor_sweeps; }),
      {"solver.allow_differential",
       [](RunConfig& c, const std::string& v) {
         c.solver.allow_differential = to_bool(v);
       },
       [](const RunConfig& c) -> std::string {
         return c.solver.allow_differential ? "true" : "false";
       }},
      {"star.const_mode",
       [](RunConfig& c, const std::string& v) {
         c.solver.const_mode =
             choose(v, {"central_density", "fixed"}) == "fixed"
                 ? ConstMode::fixed
                 : ConstMode::central_density;
       },
       [](const RunConfig& c) -> std::string {
         return c.solver.const_mode == ConstMode::fixed ? "fixed"
                                                        : "central_density";
       }},
      real("star.central_density",
           [](auto& c) -> auto& { return c.solver.central_density; }),
      real("star.first_integral_const", [](auto& c) -> auto& {
        return c.solver.first_integral_const;
      }),
      real("star.seed_radius",
           [](auto& c) -> auto& { return c.solver.seed_radius; }),
      integer<std::uint64_t>(
          "seeds.verify",
          [](auto& c) -> auto& { return c.verify_seed; }),
      integer<std::uint64_t>(
          "seeds.ricci",
          [](auto& c) -> auto& { return c.ricci_seed; }),
      integer<int>("verify.points",
                   [](auto& c) -> auto& { return c.verify_points; }),
      real("verify.tol", [](auto& c) -> auto& { return c.verify_tol; }),
      integer<int>("ricci.fields",
                   [](auto& c) -> auto& { return c.ricci_fields; }),
  };
  return table;
}

void validate_run(const RunConfig& c) {
  if (c.verify_points < 0) {
    fail(ErrorKind::config, "verify.points must be non-negative");
  }
  if (!(c.verify_tol >= 0.0)) {
    fail(ErrorKind::config, "verify.tol must be non-negative");
  }
  if (c.ricci_fields < 1) fail(ErrorKind::config, "ricci.fields must be >= 1");
  try {
    c.solver.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::hypothesis_violation) throw;
    fail(ErrorKind::config, e.what());
  }
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& origin) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::config, where + "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Key* k = nullptr;
    for (const Key& cand : keys()) {
      if (cand.name == key) k = &cand;
    }
    if (!k) fail(ErrorKind::config, where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) {
      fail(ErrorKind::config, where + "key '" + key + "' given twice");
    }
    if (value.empty() && key != "eos.upsilon_coeffs") {
      fail(ErrorKind::config, where + "missing value for '" + key + "'");
    }
    try {
      k->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      fail(ErrorKind::config, where + key + ": " + e.what());
    }
  }
  validate_run(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::config, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::string echo_config(const RunConfig& cfg) {
  std::string out;
  for (const Key& k : keys()) {
    out += k.name + " = " + k.get(cfg) + "\n";
  }
  return out;
}

}  // namespace astar
