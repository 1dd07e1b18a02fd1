#include "pfrac/config.hpp"

#include <charconv>
#include <sstream>

#include <fmt/format.h>

namespace pfrac {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

double to_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
  return x;
}

int to_int(std::string_view key, std::string_view v) {
  int x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
  return x;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, v));
}

template <class E>
E to_enum(std::string_view key, std::string_view v, std::initializer_list<std::pair<std::string_view, E>> opts) {
  std::string names;
  for (const auto& [n, e] : opts) {
    if (n == v) return e;
    names += names.empty() ? std::string(n) : fmt::format("|{}", n);
  }
  throw ConfigError(fmt::format("{}: '{}' is not one of {}", key, v, names));
}

}  // namespace

BenchmarkId parse_benchmark(std::string_view s) {
  return to_enum<BenchmarkId>("benchmark", s,
                              {{"sneddon2d", BenchmarkId::sneddon2d}, {"sens", BenchmarkId::sens},
                               {"lpanel", BenchmarkId::lpanel}});
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("line {}: expected key = value", line_no));
    const auto key = trim(line.substr(0, eq));
    const auto val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", line_no));
    out.emplace_back(std::string(key), std::string(val));
  }
  return out;
}

void set_config_value(RunConfig& c, std::string_view k, std::string_view v) {
  auto& N = c.newton;
  auto& G = c.gmres;
  if (k == "benchmark") c.benchmark = parse_benchmark(v);
  else if (k == "base_nx") c.base_nx = to_int(k, v);
  else if (k == "base_ny") c.base_ny = to_int(k, v);
  else if (k == "global_refines") c.global_refines = to_int(k, v);
  else if (k == "local_refines") c.local_refines = to_int(k, v);
  else if (k == "refine_box") {
    std::array<double, 4> b{};
    std::size_t i = 0;
    std::string_view rest = v;
    while (i < 4) {
      const auto comma = rest.find(',');
      b[i++] = to_double(k, trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (i != 4) throw ConfigError("refine_box: expected x0,y0,x1,y1");
    c.refine_box = {b[0], b[1], b[2], b[3]};
  }
  else if (k == "increments") c.increments = to_int(k, v);
  else if (k == "time_step") c.time_step = to_double(k, v);
  else if (k == "G_c") c.G_c = to_double(k, v);
  else if (k == "mu") c.mu = to_double(k, v);
  else if (k == "lambda") c.lambda = to_double(k, v);
  else if (k == "E") c.E = to_double(k, v);
  else if (k == "nu") c.nu = to_double(k, v);
  else if (k == "pressure") c.pressure = to_double(k, v);
  else if (k == "eps_factor") c.eps_factor = to_double(k, v);
  else if (k == "kappa") c.kappa = to_double(k, v);
  else if (k == "kappa_per_h") c.kappa_per_h = to_double(k, v);
  else if (k == "split") c.split = to_enum<SplitMode>(k, v, {{"none", SplitMode::none}, {"spectral", SplitMode::spectral}});
  else if (k == "plane") c.plane = to_enum<PlaneMode>(k, v, {{"strain", PlaneMode::strain}, {"stress", PlaneMode::stress}});
  else if (k == "crack_half_length") c.crack_half_length = to_double(k, v);
  else if (k == "crack_band") c.crack_band = to_double(k, v);
  else if (k == "case") {
    N.active_set_case = to_int(k, v);
    if (N.active_set_case < 1 || N.active_set_case > 4)
      throw ConfigError(fmt::format("case: {} is not one of 1..4", v));
  }
  else if (k == "c_constant") N.c = to_double(k, v);
  else if (k == "c_fallback") N.c_fallback = to_double(k, v);
  else if (k == "c_factor") N.c_factor = to_double(k, v);
  else if (k == "c_scope") N.c_scope = to_enum<CScope>(k, v, {{"per_dof", CScope::per_dof}, {"max", CScope::max_over_dofs}});
  else if (k == "tol_newton") N.tol_newton = to_double(k, v);
  else if (k == "tol_mode")
    N.tol_mode = to_enum<ToleranceMode>(k, v, {{"absolute", ToleranceMode::absolute}, {"relative", ToleranceMode::relative}});
  else if (k == "max_newton") N.max_iterations = to_int(k, v);
  else if (k == "line_search_max") N.line_search_max = to_int(k, v);
  else if (k == "damping") N.line_search_damping = to_double(k, v);
  else if (k == "case3_extra") N.case3_extra_iterations = to_int(k, v);
  else if (k == "preconditioner")
    G.preconditioner = to_enum<PreconditionerKind>(k, v, {{"none", PreconditionerKind::none}, {"jacobi", PreconditionerKind::jacobi},
                                                          {"ilu0", PreconditionerKind::ilu0}, {"block", PreconditionerKind::block}});
  else if (k == "gmres_factor") G.tolerance_factor = to_double(k, v);
  else if (k == "gmres_restart") G.restart = to_int(k, v);
  else if (k == "gmres_max") G.max_iterations = to_int(k, v);
  else if (k == "itl") c.itl = to_enum<ItlMode>(k, v, {{"none", ItlMode::none}, {"ite", ItlMode::ite}, {"itots", ItlMode::itots}});
  else if (k == "tol_itl") c.tol_itl = to_double(k, v);
  else if (k == "max_itl") c.max_itl = to_int(k, v);
  else if (k == "linearization")
    c.linearization = to_enum<Linearization>(k, v, {{"extrapolation", Linearization::extrapolation}, {"previous", Linearization::previous}});
  else if (k == "literal_indexing") c.literal_indexing = to_bool(k, v);
  else if (k == "clamp_linearization") c.clamp_linearization = to_bool(k, v);
  else if (k == "stop_on_rupture") c.stop_on_rupture = to_bool(k, v);
  else if (k == "rupture_fraction") c.rupture_fraction = to_double(k, v);
  else if (k == "out") c.out_dir = std::string(v);
  else if (k == "vtk_every") c.vtk_every = to_int(k, v);
  else throw ConfigError(fmt::format("unknown key '{}'", k));
}

RunConfig parse_config(std::string_view file_text, const KeyValues& overrides) {
  const KeyValues file = parse_key_values(file_text);
  std::string_view bench = "sneddon2d";
  for (const auto& [k, v] : file)
    if (k == "benchmark") bench = v;
  for (const auto& [k, v] : overrides)
    if (k == "benchmark") bench = v;
  RunConfig cfg = preset(parse_benchmark(bench));
  for (const auto& [k, v] : file) set_config_value(cfg, k, v);
  for (const auto& [k, v] : overrides) set_config_value(cfg, k, v);
  cfg.validate();
  return cfg;
}

std::string echo_config(const RunConfig& c) {
  const auto& N = c.newton;
  const auto& G = c.gmres;
  std::ostringstream o;
  for (const auto& n : c.notes) o << "# " << n << '\n';
  o << fmt::format("benchmark = {}\n", to_string(c.benchmark));
  o << fmt::format("base_nx = {}\nbase_ny = {}\n", c.base_nx, c.base_ny);
  o << fmt::format("global_refines = {}\nlocal_refines = {}\n", c.global_refines, c.local_refines);
  o << fmt::format("refine_box = {},{},{},{}\n", c.refine_box.x0, c.refine_box.y0, c.refine_box.x1, c.refine_box.y1);
  o << fmt::format("increments = {}\ntime_step = {}\n", c.increments, c.time_step);
  o << fmt::format("G_c = {}\nmu = {}\nlambda = {}\nE = {}\nnu = {}\n", c.G_c, c.mu, c.lambda, c.E, c.nu);
  o << fmt::format("pressure = {}\neps_factor = {}\nkappa = {}\nkappa_per_h = {}\n", c.pressure, c.eps_factor, c.kappa,
                   c.kappa_per_h);
  o << fmt::format("split = {}\nplane = {}\ncrack_half_length = {}\ncrack_band = {}\n", to_string(c.split), to_string(c.plane),
                   c.crack_half_length, c.crack_band);
  o << fmt::format("c_factor = {}\n", N.c_factor);
  o << fmt::format("case = {}\nc_constant = {}\nc_fallback = {}\nc_scope = {}\n", N.active_set_case, N.c, N.c_fallback,
                   N.c_scope == CScope::per_dof ? "per_dof" : "max");
  o << fmt::format("tol_newton = {}\ntol_mode = {}\nmax_newton = {}\n", N.tol_newton,
                   N.tol_mode == ToleranceMode::absolute ? "absolute" : "relative", N.max_iterations);
  o << fmt::format("line_search_max = {}\ndamping = {}\ncase3_extra = {}\n", N.line_search_max, N.line_search_damping,
                   N.case3_extra_iterations);
  o << fmt::format("preconditioner = {}\ngmres_factor = {}\ngmres_restart = {}\ngmres_max = {}\n",
                   to_string(G.preconditioner), G.tolerance_factor, G.restart, G.max_iterations);
  o << fmt::format("itl = {}\ntol_itl = {}\nmax_itl = {}\nlinearization = {}\n", to_string(c.itl), c.tol_itl, c.max_itl,
                   to_string(c.linearization));
  o << fmt::format("literal_indexing = {}\nclamp_linearization = {}\n", c.literal_indexing, c.clamp_linearization);
  o << fmt::format("stop_on_rupture = {}\nrupture_fraction = {}\n", c.stop_on_rupture, c.rupture_fraction);
  o << fmt::format("out = {}\nvtk_every = {}\n", c.out_dir, c.vtk_every);
  return o.str();
}

}  // namespace pfrac
