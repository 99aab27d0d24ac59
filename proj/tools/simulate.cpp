// simulate <subcommand> --config <path> --out <dir> [--margin] [--cap-omega-t] [--workers]
#include <CLI11.hpp>

#include <cisim/cisim.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;

namespace {

int exit_code(cisim_status s) {
  switch (s) {
    case CISIM_OK: return 0;
    case CISIM_ERR_PARSE:
    case CISIM_ERR_UNIT:
    case CISIM_ERR_INVALID_ARGUMENT: return 2;
    case CISIM_ERR_DOMAIN: return 3;
    case CISIM_ERR_RESOLUTION: return 4;
    case CISIM_ERR_INTERNAL: return 5;
  }
  return 5;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

int report(int code, const std::string& kind, const std::string& msg) {
  std::cerr << "error code=" << code << " kind=" << kind << " message=\"" << escape(msg) << "\"\n";
  return code;
}

int report(cisim_status s) { return report(exit_code(s), cisim_last_error_kind(), cisim_last_error()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent-inflation interferometry simulator"};
  std::string subcommand, config_path, out_dir;
  double margin = 0.0, cap = 0.0;
  unsigned workers = 0;
  app.add_option("subcommand", subcommand, "coherence | ci-gain | fringes | protocol | budget | falsify | sweep")
      ->required();
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "Output directory (SIMULATE_OUT_DIR overrides)");
  auto* margin_opt = app.add_option("--margin", margin, "Factor used for 'much less than' checks");
  auto* cap_opt = app.add_option("--cap-omega-t", cap, "Cap on omega*t for inverted segments");
  auto* workers_opt = app.add_option("--workers", workers, "Sweep worker threads");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(2, "parse", e.what());
  }

  if (const char* env = std::getenv("SIMULATE_OUT_DIR"); env && *env) out_dir = env;
  if (out_dir.empty()) return report(2, "parse", "no output directory: pass --out or set SIMULATE_OUT_DIR");

  cisim_config* cfg = nullptr;
  if (auto s = cisim_config_load(config_path.c_str(), &cfg); s != CISIM_OK) return report(s);
  cisim_status s = CISIM_OK;
  if (margin_opt->count()) s = cisim_config_set_margin(cfg, margin);
  if (s == CISIM_OK && cap_opt->count()) s = cisim_config_set_cap_omega_t(cfg, cap);
  if (s == CISIM_OK && workers_opt->count()) s = cisim_config_set_workers(cfg, workers);
  cisim_result* result = nullptr;
  if (s == CISIM_OK) s = cisim_run(cfg, subcommand.c_str(), &result);
  cisim_config_free(cfg);
  if (s != CISIM_OK) return report(s);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    cisim_result_free(result);
    return report(2, "parse", "cannot create output directory '" + out_dir + "': " + ec.message());
  }
  for (size_t i = 0; i < cisim_result_artifact_count(result); ++i) {
    size_t len = 0;
    const char* data = cisim_result_artifact_data(result, i, &len);
    const fs::path path = fs::path(out_dir) / cisim_result_artifact_name(result, i);
    std::ofstream f(path, std::ios::binary);
    f.write(data, static_cast<std::streamsize>(len));
    if (!f) {
      cisim_result_free(result);
      return report(5, "internal", "cannot write " + path.string());
    }
  }
  for (size_t i = 0; i < cisim_result_warning_count(result); ++i)
    std::cerr << "warning: " << cisim_result_warning(result, i) << "\n";
  for (size_t i = 0; i < cisim_result_summary_count(result); ++i)
    std::cout << cisim_result_summary_key(result, i) << "=" << cisim_result_summary_text(result, i) << "\n";
  cisim_result_free(result);
  return 0;
}
