#include "cisim/cisim.h"

#include <cmath>
#include <new>
#include <string>

#include "cisim/feasibility.hpp"
#include "commands.hpp"

struct cisim_config {
  cisim::RunConfig cfg;
};

struct cisim_result {
  cisim::CommandResult result;
  std::vector<std::string> summary_text;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_kind;

cisim_status fail(cisim_status status, const char* kind, const std::string& msg) {
  g_error = msg;
  g_error_kind = kind;
  return status;
}

cisim_status status_of(const cisim::Error& e) {
  switch (e.kind()) {
    case cisim::ErrorKind::Parse: return CISIM_ERR_PARSE;
    case cisim::ErrorKind::Unit: return CISIM_ERR_UNIT;
    case cisim::ErrorKind::Domain: return CISIM_ERR_DOMAIN;
    case cisim::ErrorKind::Resolution:
    case cisim::ErrorKind::OverflowGuard: return CISIM_ERR_RESOLUTION;
    case cisim::ErrorKind::Consistency: return CISIM_ERR_INTERNAL;
  }
  return CISIM_ERR_INTERNAL;
}

template <class F>
cisim_status guarded(F&& f) {
  try {
    f();
    g_error.clear();
    g_error_kind.clear();
    return CISIM_OK;
  } catch (const cisim::Error& e) {
    return fail(status_of(e), cisim::to_string(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CISIM_ERR_INTERNAL, "internal", "out of memory");
  } catch (const std::exception& e) {
    return fail(CISIM_ERR_INTERNAL, "internal", e.what());
  } catch (...) {
    return fail(CISIM_ERR_INTERNAL, "internal", "unknown error");
  }
}

cisim_status null_arg(const char* fn) {
  return fail(CISIM_ERR_INVALID_ARGUMENT, "invalid_argument", std::string(fn) + ": null argument");
}

}  // namespace

extern "C" {

const char* cisim_version(void) { return "0.1.0"; }

const char* cisim_last_error(void) { return g_error.c_str(); }

const char* cisim_last_error_kind(void) { return g_error_kind.c_str(); }

cisim_status cisim_config_load(const char* path, cisim_config** out) {
  if (!path || !out) return null_arg("cisim_config_load");
  *out = nullptr;
  return guarded([&] { *out = new cisim_config{cisim::load_config(path)}; });
}

cisim_status cisim_config_parse(const char* json_text, cisim_config** out) {
  if (!json_text || !out) return null_arg("cisim_config_parse");
  *out = nullptr;
  return guarded([&] { *out = new cisim_config{cisim::parse_config_text(json_text)}; });
}

cisim_status cisim_config_set_number(cisim_config* cfg, const char* dotted_key, double value) {
  if (!cfg || !dotted_key) return null_arg("cisim_config_set_number");
  return guarded([&] {
    auto doc = cfg->cfg.raw;
    cisim::set_config_number(doc, dotted_key, value);
    cfg->cfg = cisim::parse_config(doc);
  });
}

// Overrides are written into the document too, so sweeps re-parsing it keep them.
cisim_status cisim_config_set_margin(cisim_config* cfg, double margin) {
  if (!cfg) return null_arg("cisim_config_set_margin");
  return guarded([&] {
    auto doc = cfg->cfg.raw;
    doc["margin"] = margin;
    cfg->cfg = cisim::parse_config(doc);
  });
}

cisim_status cisim_config_set_cap_omega_t(cisim_config* cfg, double cap) {
  if (!cfg) return null_arg("cisim_config_set_cap_omega_t");
  return guarded([&] {
    auto doc = cfg->cfg.raw;
    doc["cap_omega_t"] = cap;
    cfg->cfg = cisim::parse_config(doc);
  });
}

cisim_status cisim_config_set_workers(cisim_config* cfg, unsigned workers) {
  if (!cfg) return null_arg("cisim_config_set_workers");
  return guarded([&] {
    auto doc = cfg->cfg.raw;
    doc["workers"] = workers;
    cfg->cfg = cisim::parse_config(doc);
  });
}

void cisim_config_free(cisim_config* cfg) { delete cfg; }

cisim_status cisim_run(const cisim_config* cfg, const char* subcommand, cisim_result** out) {
  if (!cfg || !subcommand || !out) return null_arg("cisim_run");
  *out = nullptr;
  const auto cmd = cisim::parse_subcommand(subcommand);
  if (!cmd) return fail(CISIM_ERR_PARSE, "parse", std::string("unknown subcommand '") + subcommand + "'");
  return guarded([&] {
    auto r = new cisim_result{cisim::run_command(*cmd, cfg->cfg), {}};
    for (const auto& f : r->result.summary) {
      const auto one = cisim::to_key_value_text({f});
      r->summary_text.push_back(one.substr(one.find('=') + 1, one.size() - one.find('=') - 2));
    }
    *out = r;
  });
}

size_t cisim_result_artifact_count(const cisim_result* r) { return r ? r->result.artifacts.size() : 0; }

const char* cisim_result_artifact_name(const cisim_result* r, size_t i) {
  if (!r || i >= r->result.artifacts.size()) return nullptr;
  return r->result.artifacts[i].name.c_str();
}

const char* cisim_result_artifact_data(const cisim_result* r, size_t i, size_t* length) {
  if (!r || i >= r->result.artifacts.size()) return nullptr;
  const auto& a = r->result.artifacts[i].content;
  if (length) *length = a.size();
  return a.c_str();
}

size_t cisim_result_summary_count(const cisim_result* r) { return r ? r->result.summary.size() : 0; }

const char* cisim_result_summary_key(const cisim_result* r, size_t i) {
  if (!r || i >= r->result.summary.size()) return nullptr;
  return r->result.summary[i].key.c_str();
}

double cisim_result_summary_value(const cisim_result* r, size_t i) {
  if (!r || i >= r->result.summary.size()) return std::nan("");
  const auto& v = r->result.summary[i].value;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
  return std::nan("");
}

const char* cisim_result_summary_text(const cisim_result* r, size_t i) {
  if (!r || i >= r->summary_text.size()) return nullptr;
  return r->summary_text[i].c_str();
}

cisim_status cisim_result_scalar(const cisim_result* r, const char* key, double* value) {
  if (!r || !key || !value) return null_arg("cisim_result_scalar");
  for (std::size_t i = 0; i < r->result.summary.size(); ++i)
    if (r->result.summary[i].key == key) {
      *value = cisim_result_summary_value(r, i);
      return CISIM_OK;
    }
  return fail(CISIM_ERR_INVALID_ARGUMENT, "invalid_argument", std::string("no summary entry '") + key + "'");
}

size_t cisim_result_warning_count(const cisim_result* r) { return r ? r->result.warnings.size() : 0; }

const char* cisim_result_warning(const cisim_result* r, size_t i) {
  if (!r || i >= r->result.warnings.size()) return nullptr;
  return r->result.warnings[i].c_str();
}

void cisim_result_free(cisim_result* r) { delete r; }

cisim_status cisim_convert(double value, const char* from_unit, const char* to_unit, double* out) {
  if (!from_unit || !to_unit || !out) return null_arg("cisim_convert");
  return guarded([&] { *out = cisim::convert(cisim::from_unit(value, from_unit), to_unit); });
}

cisim_status cisim_sphere_mass(double radius_m, double density_kg_per_m3, double* mass_kg) {
  if (!mass_kg) return null_arg("cisim_sphere_mass");
  return guarded([&] {
    *mass_kg = cisim::sphere_mass(cisim::Length{radius_m}, cisim::Density{density_kg_per_m3}).si();
  });
}

cisim_status cisim_ci_gain(double omega0, double omega_inverted, double t_inflate, double* g, double* g_x,
                           double* g_p) {
  return guarded([&] {
    const auto gain = cisim::ci_gain(cisim::Rate{omega0}, cisim::Rate{omega_inverted}, cisim::Time{t_inflate});
    if (g) *g = gain.g;
    if (g_x) *g_x = gain.g_x;
    if (g_p) *g_p = gain.g_p;
  });
}

cisim_status cisim_t_lambda(double mass_kg, double omega0, double lambda_hz_per_m2, double* t_lambda_s, double* xi_m) {
  return guarded([&] {
    const auto t = cisim::t_lambda(cisim::Mass{mass_kg}, cisim::Rate{omega0}, cisim::LocalizationRate{lambda_hz_per_m2});
    if (t_lambda_s) *t_lambda_s = t.t_lambda.si();
    if (xi_m) *xi_m = t.xi_at_t_lambda.si();
  });
}

}  // extern "C"
