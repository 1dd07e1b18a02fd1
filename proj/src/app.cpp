#include "pfrac/app.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "pfrac/config.hpp"
#include "pfrac/output.hpp"

namespace pfrac {

void init_logging() {
  static bool done = false;
  if (done) return;
  done = true;
  auto logger = spdlog::stderr_color_mt("pfrac");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* lv = std::getenv("PFRAC_LOG_LEVEL")) spdlog::cfg::helpers::load_levels(lv);
}

namespace {

int run_command(const std::string& config_file, const KeyValues& overrides) {
  std::string text;
  if (!config_file.empty()) {
    std::ifstream f(config_file);
    if (!f) throw ConfigError(fmt::format("cannot read config file {}", config_file));
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  RunConfig cfg = parse_config(text, overrides);
  if (cfg.out_dir.empty()) cfg.out_dir = fmt::format("out_{}", to_string(cfg.benchmark));
  const std::filesystem::path out = cfg.out_dir;
  std::filesystem::create_directories(out);

  Setup setup = build_setup(cfg);
  {
    std::ofstream echo(out / "config.echo");
    echo << echo_config(setup.config);
    echo << fmt::format("# cells = {}\n# nodes = {}\n# dofs = {}\n# hanging nodes = {}\n", setup.mesh.n_cells(),
                        setup.mesh.n_nodes(), setup.dofs.total(), setup.constraints.hanging.size());
    echo << fmt::format("# h_min = {}\n# eps = {}\n# kappa = {}\n", setup.mesh.h_min(), setup.params.eps,
                        setup.params.kappa);
    if (setup.tcv_reference != 0.0) echo << fmt::format("# tcv_reference = {}\n", setup.tcv_reference);
  }
  spdlog::info("{}: {} cells, {} dofs, h = {:.5g}", to_string(cfg.benchmark), setup.mesh.n_cells(), setup.dofs.total(),
               setup.mesh.h_min());

  std::vector<QoiRecord> records;
  auto on_step = [&](const StepResult& s, const Setup& S) {
    records.push_back(s.record);
    write_csv(records, out / "qoi.csv");
    if (S.config.vtk_every > 0 && s.record.step % S.config.vtk_every == 0) {
      const auto& st = S.state;
      const auto nu = static_cast<std::size_t>(S.dofs.n_u());
      write_vtk(S.mesh, std::span<const double>(st.U.data(), nu),
                std::span<const double>(st.U.data() + nu, st.U.size() - nu), st.lambda, s.active,
                out / fmt::format("fields_{}.vtk", s.record.step));
    }
  };
  const RunResult run = run_incremental_loop(setup, on_step);
  write_csv(records, out / "qoi.csv");
  if (!run.all_converged) {
    spdlog::warn("at least one increment did not converge");
    return exit_not_converged;
  }
  return exit_ok;
}

}  // namespace

int run_cli(int argc, char** argv) {
  init_logging();
  CLI::App app{"Quasi-static phase-field fracture solver"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "run a benchmark");

  std::string config_file;
  std::vector<std::string> sets;
  KeyValues overrides;
  struct Opt {
    const char* flag;
    const char* key;
    const char* help;
  };
  const std::vector<Opt> opts = {
      {"--benchmark", "benchmark", "sneddon2d | sens | lpanel"},
      {"--case", "case", "active-set strategy 1..4"},
      {"--itl", "itl", "none | ite | itots"},
      {"--global-refines", "global_refines", "global refinement count"},
      {"--local-refines", "local_refines", "local refinement count"},
      {"--tol-newton", "tol_newton", "Newton tolerance"},
      {"--tol-itl", "tol_itl", "tolerance of the iteration on the linearization"},
      {"--increments", "increments", "number of increments"},
      {"--out", "out", "output directory"},
      {"--split", "split", "none | spectral"},
      {"--plane", "plane", "strain | stress"},
      {"--vtk-every", "vtk_every", "write fields every N increments (0 = never)"},
  };
  std::vector<std::string> values(opts.size());
  for (std::size_t i = 0; i < opts.size(); ++i) run->add_option(opts[i].flag, values[i], opts[i].help);
  run->add_option("--config", config_file, "key = value file");
  run->add_option("--set", sets, "extra key=value override")->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config_error;
  }

  try {
    for (std::size_t i = 0; i < opts.size(); ++i)
      if (run->count(opts[i].flag)) overrides.emplace_back(opts[i].key, values[i]);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(fmt::format("--set expects key=value, got '{}'", s));
      overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return run_command(config_file, overrides);
  } catch (const ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return exit_config_error;
  } catch (const MeshError& e) {
    spdlog::error("mesh error: {}", e.what());
    return exit_config_error;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return exit_failure;
  }
}

}  // namespace pfrac
