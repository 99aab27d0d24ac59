#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace cisim {

namespace {

BudgetInputs budget_inputs(const RunConfig& cfg) {
  const auto& plan = cfg.plan;
  BudgetInputs in;
  in.sphere = plan.sphere;
  in.omega0 = plan.omega0;
  in.env = plan.env;
  in.omega_inverted = plan.omega_inverted;
  in.slit_separation = plan.slit_separation;
  in.t_inflate = cfg.t_inflate;
  in.margin = cfg.margin;
  in.include_gravity = plan.sources.gravity;
  return in;
}

FalsificationInputs falsification_inputs(const RunConfig& cfg) {
  const auto& plan = cfg.plan;
  FalsificationInputs in;
  in.sphere = plan.sphere;
  in.omega0 = plan.omega0;
  in.env = plan.env;
  if (cfg.raw.contains("slit")) in.scale = plan.slit_separation;
  in.omega_inverted = plan.omega_inverted;
  in.t_inflate = plan.t_inflate;
  if (cfg.free_time_given) in.pre_slit_time = plan.free_time;
  in.margin = cfg.margin;
  return in;
}

void require_free_time(const RunConfig& cfg) {
  if (!cfg.free_time_given) throw ParseError("protocol: free_time is required (e.g. \"free_time_s\")");
}

std::vector<Time> log_times(double t_min, double t_max, std::size_t n, const ReducedUnits& u) {
  std::vector<Time> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = u.time(std::exp(std::log(t_min) + f * (std::log(t_max) - std::log(t_min))));
  }
  return out;
}

CommandResult coherence_reduced(const RunConfig& cfg) {
  const auto& spec = *cfg.reduced;
  const auto ground = ground_state(cfg.plan.sphere.mass(), cfg.plan.omega0);
  const auto units = ReducedUnits::of_ground_state(ground);
  double t_max = spec.t_max;
  if (t_max == 0.0)
    for (double l : spec.lambda_tilde) t_max = std::max(t_max, 10.0 * std::cbrt(3.0 / (4.0 * l)));
  if (!(t_max > spec.t_min)) throw DomainError("coherence: t_max_reduced must exceed t_min_reduced");
  const auto times = log_times(spec.t_min, t_max, spec.samples, units);

  std::optional<GaussianState> inflated;
  if (spec.g_x) inflated = inflated_state(ground, CiGain{*spec.g_x * *spec.g_p, *spec.g_x, *spec.g_p});

  std::string curves = "lambda_tilde,curve,t_reduced,xi_reduced,purity\n";
  std::string peaks = "lambda_tilde,t_peak_reduced,xi_peak_reduced,t_peak_formula_reduced,xi_peak_formula_reduced";
  peaks += inflated ? ",t_peak_ci_reduced,xi_peak_ci_reduced,ci_peak_time_ratio\n" : "\n";
  std::vector<std::string> warnings;
  const auto emit_curve = [&](double lt, const char* name, const std::vector<TimelinePoint>& pts) {
    for (const auto& p : pts)
      curves += format_double(lt) + "," + name + "," + format_double(p.reduced_time) + "," +
                format_double(p.reduced_xi) + "," + format_double(p.purity) + "\n";
  };
  for (double lt : spec.lambda_tilde) {
    const auto lambda = units.lambda(lt);
    emit_curve(lt, "free", free_coherence_curve(ground, units, lambda, Rate{0.0}, times));
    const auto peak = coherence_peak(ground, lambda);
    const double tp = units.reduced_time(peak.time), xp = units.reduced_length(peak.xi);
    peaks += format_double(lt) + "," + format_double(tp) + "," + format_double(xp) + "," +
             format_double(std::cbrt(3.0 / (4.0 * lt))) + "," +
             format_double(std::pow(32.0 / (3.0 * lt * lt), 1.0 / 6.0));
    if (inflated) {
      emit_curve(lt, "ci", free_coherence_curve(*inflated, units, lambda, Rate{0.0}, times));
      const auto ci_peak = coherence_peak(*inflated, lambda);
      const double tc = units.reduced_time(ci_peak.time);
      if (tc == 0.0)
        warnings.push_back("inflated state at lambda_tilde=" + format_double(lt) +
                           " only loses coherence; its peak is the initial state");
      peaks += "," + format_double(tc) + "," + format_double(units.reduced_length(ci_peak.xi)) + "," +
               format_double(tc / tp);
    }
    peaks += "\n";
  }
  CommandResult r;
  r.artifacts = {{"coherence.csv", curves}, {"coherence_peaks.csv", peaks}};
  r.summary = {{"mode", std::string("reduced")},
               {"curves", static_cast<double>(spec.lambda_tilde.size())},
               {"x0_m", units.x0.si()},
               {"omega0_Hz", units.omega0.si()}};
  r.warnings = std::move(warnings);
  return r;
}

CommandResult coherence(const RunConfig& cfg) {
  if (cfg.reduced) return coherence_reduced(cfg);
  const auto pts = coherence_timeline(cfg.plan, cfg.timeline_samples, cfg.log_spacing);
  std::string csv = "t_s,xi_m,purity,t_reduced,xi_reduced\n";
  const TimelinePoint* best = &pts.front();
  for (const auto& p : pts) {
    csv += format_double(p.t.si()) + "," + format_double(p.xi.si()) + "," + format_double(p.purity) + "," +
           format_double(p.reduced_time) + "," + format_double(p.reduced_xi) + "\n";
    if (p.xi > best->xi) best = &p;
  }
  CommandResult r;
  r.artifacts = {{"timeline.csv", csv}};
  r.summary = {{"mode", std::string("plan")},
               {"samples", static_cast<double>(pts.size())},
               {"xi_max_m", best->xi.si()},
               {"t_at_xi_max_s", best->t.si()},
               {"xi_final_m", pts.back().xi.si()},
               {"purity_final", pts.back().purity}};
  return r;
}

CommandResult ci_gain_cmd(const RunConfig& cfg) {
  const auto& plan = cfg.plan;
  std::vector<double> times = cfg.ci_gain_times;
  if (times.empty()) times.push_back(plan.t_inflate.si());
  std::string csv = "t_inflate_s,g,g_x,g_p\n";
  CiGain last;
  for (double t : times) {
    last = ci_gain(plan.omega0, plan.omega_inverted, Time{t}, plan.cap_omega_t);
    csv += format_double(t) + "," + format_double(last.g) + "," + format_double(last.g_x) + "," +
           format_double(last.g_p) + "\n";
  }
  const Mass M = plan.sphere.mass();
  const auto rates = step_rates(plan);
  const auto bound = max_coherent_gain(M, plan.omega0, plan.omega_inverted, rates.lw + rates.vibration);
  CommandResult r;
  r.artifacts = {{"ci_gain.csv", csv}};
  r.summary = {{"g", last.g},
               {"g_x", last.g_x},
               {"g_p", last.g_p},
               {"lambda_inflation_Hz_per_m2", (rates.lw + rates.vibration).si()},
               {"g_star", bound.g_star},
               {"t_inflate_at_bound_s", bound.t_inflate_at_bound.si()},
               {"unbounded", bound.unbounded}};
  return r;
}

CommandResult fringes(const RunConfig& cfg) {
  const auto& plan = cfg.plan;
  plan.validate();
  const Mass M = plan.sphere.mass();
  const auto cat = CatState::make(M, plan.slit_separation, plan.slit_width);
  const auto rates = step_rates(plan);
  const LocalizationRate lw = cfg.fringes.lambda_loc.value_or(rates.lw);
  const LocalizationRate lw_potential = cfg.fringes.lambda_loc.value_or(rates.lw + rates.vibration);
  const auto kind = cfg.fringes.evolution;

  std::vector<PotentialSegment> segs = cfg.segments;
  Time t = cfg.fringes.time;
  if (segs.empty()) {
    if (kind == EvolutionKind::FreeExpansion) {
      segs = {PotentialSegment::free(t, lw, rates.gamma)};
    } else {
      if (t.si() == 0.0)
        t = mapping_duration_for_fringe(M, plan.slit_separation, plan.omega_inverted, plan.detectable_fringe,
                                        plan.cap_omega_t);
      segs = momentum_mapping_segments(plan.omega_inverted, t, lw_potential, rates.gamma);
    }
  }
  const auto evo = compose(segs, M, plan.cap_omega_t);
  const auto grid = resolved_grid(cat, evo, plan.grid);
  const auto p = synthesize_pattern(cat, evo, kind, grid);

  CommandResult r;
  r.summary = pattern_meta(p);
  r.summary.push_back({"elapsed_s", evo.elapsed.si()});
  r.summary.push_back({"sw_factor", evo.sw_decay()});
  if (cfg.segments.empty()) {
    if (kind == EvolutionKind::FreeExpansion) {
      r.summary.push_back({"fringe_separation_law_m", free_fringe_separation(M, plan.slit_separation, t).si()});
      r.summary.push_back({"blur_scale_law_m", free_blur_scale(M, lw, t).si()});
    } else {
      r.summary.push_back({"inverted_duration_s", t.si()});
      r.summary.push_back({"fringe_separation_law_m",
                           ci_fringe_separation(M, plan.slit_separation, plan.omega_inverted, t, plan.cap_omega_t).si()});
      r.summary.push_back(
          {"blur_scale_law_m", ci_blur_scale(M, lw_potential, plan.omega_inverted, t, plan.cap_omega_t).si()});
    }
  }
  if (cat.wide_slit_warning()) r.warnings.push_back("slit width exceeds d/4; branches overlap");
  r.artifacts = {{"pattern.csv", pattern_csv(p)}, {"pattern_meta.json", to_json(pattern_meta(p))},
                 {"summary.json", to_json(r.summary)}};
  return r;
}

CommandResult protocol(const RunConfig& cfg) {
  require_free_time(cfg);
  const auto trace = run_protocol(cfg.plan);
  CommandResult r;
  r.summary = protocol_summary(trace);
  if (!trace.verdicts.slit_feasible) r.warnings.push_back("slit separation exceeds the coherence length at the slit");
  if (trace.verdicts.rotation_nonstandard) r.warnings.push_back("rotation time differs from pi/(4 omega_I)");
  if (trace.verdicts.mapping_capped) r.warnings.push_back("mapping duration capped by the omega*t limit");
  if (trace.verdicts.slit_wide_warning) r.warnings.push_back("slit width exceeds d/4; branches overlap");
  std::string timeline = "t_s,xi_m,purity,t_reduced,xi_reduced\n";
  for (const auto& p : coherence_timeline(cfg.plan, cfg.timeline_samples, cfg.log_spacing))
    timeline += format_double(p.t.si()) + "," + format_double(p.xi.si()) + "," + format_double(p.purity) + "," +
                format_double(p.reduced_time) + "," + format_double(p.reduced_xi) + "\n";
  r.artifacts = {{"trace.csv", trace_csv(trace)},
                 {"timeline.csv", timeline},
                 {"pattern.csv", pattern_csv(trace.pattern)},
                 {"pattern_meta.json", to_json(pattern_meta(trace.pattern))},
                 {"summary.json", to_json(r.summary)}};
  return r;
}

CommandResult budget_cmd(const RunConfig& cfg) {
  const auto b = budget(budget_inputs(cfg));
  CommandResult r;
  r.summary = budget_record(b);
  r.artifacts = {{"budget.txt", to_key_value_text(r.summary)},
                 {"budget.csv", csv_header(r.summary) + csv_row(r.summary)},
                 {"summary.json", to_json(r.summary)}};
  return r;
}

CommandResult falsify(const RunConfig& cfg) {
  const auto w = falsification_window(falsification_inputs(cfg));
  CommandResult r;
  r.summary = falsification_record(w);
  r.summary.push_back({"margin", cfg.margin});
  r.artifacts = {{"falsify.txt", to_key_value_text(r.summary)}, {"summary.json", to_json(r.summary)}};
  return r;
}

Record sweep_point(Subcommand target, const RunConfig& cfg) {
  switch (target) {
    case Subcommand::Falsify: {
      auto rec = falsification_record(falsification_window(falsification_inputs(cfg)));
      rec.push_back({"margin", cfg.margin});
      return rec;
    }
    case Subcommand::Protocol:
      require_free_time(cfg);
      return protocol_summary(run_protocol(cfg.plan));
    default:
      return budget_record(budget(budget_inputs(cfg)));
  }
}

CommandResult sweep(const RunConfig& cfg) {
  if (!cfg.sweep) throw ParseError("sweep: config has no 'sweep' section");
  const auto& spec = *cfg.sweep;
  double total = 1.0;
  for (const auto& a : spec.axes) total *= static_cast<double>(a.count);
  if (total > static_cast<double>(spec.max_points)) {
    std::ostringstream os;
    os << "sweep has " << total << " points, above the cap of " << spec.max_points;
    throw ResolutionError(os.str());
  }
  const auto n = static_cast<std::size_t>(total);

  std::vector<std::string> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::string header;
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        // Lexicographic: the first axis varies slowest.
        std::vector<std::size_t> idx(spec.axes.size());
        std::size_t rem = i;
        for (std::size_t k = spec.axes.size(); k-- > 0;) {
          idx[k] = rem % spec.axes[k].count;
          rem /= spec.axes[k].count;
        }
        nlohmann::json doc = cfg.raw;
        doc.erase("sweep");
        Record rec;
        for (std::size_t k = 0; k < spec.axes.size(); ++k) {
          const double v = spec.axes[k].value(idx[k]);
          set_config_number(doc, spec.axes[k].key, v);
          rec.push_back({spec.axes[k].key, v});
        }
        const auto point_cfg = parse_config(doc);
        for (auto& f : sweep_point(spec.target, point_cfg)) rec.push_back(std::move(f));
        rows[i] = csv_row(rec);
        if (i == 0) header = csv_header(rec);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(cfg.workers, n));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);

  std::string csv = header;
  for (const auto& row : rows) csv += row;
  CommandResult r;
  r.artifacts = {{"sweep.csv", csv}};
  r.summary = {{"target", std::string(to_string(spec.target))},
               {"points", static_cast<double>(n)},
               {"axes", static_cast<double>(spec.axes.size())}};
  return r;
}

}  // namespace

CommandResult run_command(Subcommand cmd, const RunConfig& cfg) {
  switch (cmd) {
    case Subcommand::Coherence: return coherence(cfg);
    case Subcommand::CiGain: return ci_gain_cmd(cfg);
    case Subcommand::Fringes: return fringes(cfg);
    case Subcommand::Protocol: return protocol(cfg);
    case Subcommand::Budget: return budget_cmd(cfg);
    case Subcommand::Falsify: return falsify(cfg);
    case Subcommand::Sweep: return sweep(cfg);
  }
  throw ParseError("unknown subcommand");
}

}  // namespace cisim
