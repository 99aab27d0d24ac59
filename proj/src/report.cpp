#include "report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace cisim {

namespace {

std::string cell(const Field& f, bool quote_strings) {
  if (const auto* d = std::get_if<double>(&f.value)) {
    // JSON has no inf/nan literals.
    if (quote_strings && !std::isfinite(*d)) return "\"" + format_double(*d) + "\"";
    return format_double(*d);
  }
  if (const auto* b = std::get_if<bool>(&f.value)) return *b ? "true" : "false";
  const auto& s = std::get<std::string>(f.value);
  return quote_strings ? "\"" + s + "\"" : s;
}

template <class T>
std::string opt(const std::optional<T>& v) {
  return v ? format_double(v->si()) : "";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

std::string to_json(const Record& r) {
  std::string out = "{\n";
  for (std::size_t i = 0; i < r.size(); ++i) {
    out += "  \"" + r[i].key + "\": " + cell(r[i], true);
    out += i + 1 < r.size() ? ",\n" : "\n";
  }
  return out + "}\n";
}

std::string to_key_value_text(const Record& r) {
  std::string out;
  for (const auto& f : r) out += f.key + "=" + cell(f, false) + "\n";
  return out;
}

std::string csv_header(const Record& r) {
  std::string out;
  for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i].key;
  return out + "\n";
}

std::string csv_row(const Record& r) {
  std::string out;
  for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell(r[i], false);
  return out + "\n";
}

std::string pattern_csv(const FringePattern& p) {
  std::string out = "x_m,probability_density_per_m\n";
  out.reserve(out.size() + p.size() * 48);
  for (std::size_t i = 0; i < p.size(); ++i) out += format_double(p.x(i)) + "," + format_double(p.density[i]) + "\n";
  return out;
}

Record pattern_meta(const FringePattern& p) {
  return {{"fringe_separation_m", p.fringe_separation.si()},
          {"blur_scale_m", p.blur_scale.si()},
          {"visibility", p.visibility ? *p.visibility : std::nan("")},
          {"evolution_kind", std::string(to_string(p.kind))},
          {"points", static_cast<double>(p.size())},
          {"integral", p.integral()}};
}

Record budget_record(const Budget& b) {
  Record r;
  for (const auto& s : b.sources) {
    const std::string k(to_string(s.kind));
    r.push_back({"regime_" + k, std::string(s.regime == Regime::LongWavelength ? "LW" : "SW")});
    r.push_back({"gamma_" + k + "_Hz", s.gamma.si()});
    r.push_back({"lambda_" + k + "_Hz_per_m2", s.lambda_loc.si()});
    r.push_back({"t_lambda_" + k + "_s", s.t_lambda.si()});
  }
  r.push_back({"lambda_total_Hz_per_m2", b.lambda_total.si()});
  r.push_back({"gamma_total_Hz", b.gamma_total.si()});
  r.push_back({"t_lambda_s", b.t_lambda_min.si()});
  r.push_back({"t_star_s", b.t_star.si()});
  r.push_back({"xi_star_m", b.xi_star.si()});
  r.push_back({"t_inflate_s", b.t_inflate.si()});
  r.push_back({"g", b.gain.g});
  r.push_back({"g_x", b.gain.g_x});
  r.push_back({"g_p", b.gain.g_p});
  r.push_back({"t_star_inflated_s", b.t_star_inflated.si()});
  r.push_back({"xi_star_inflated_m", b.xi_star_inflated.si()});
  r.push_back({"lambda_vibration_Hz_per_m2", b.lambda_vibration.si()});
  r.push_back({"g_star", b.g_star});
  r.push_back({"g_p_star", b.g_p_star});
  r.push_back({"s_xx_max_inflation_m2_per_Hz", b.s_xx_max_inflation.si()});
  r.push_back({"s_xx_max_fringes_m2_per_Hz", b.s_xx_max_fringes.si()});
  return r;
}

Record falsification_record(const FalsificationWindow& w) {
  return {{"xi_with_gravity_m", w.xi_with_gravity.si()},
          {"xi_without_gravity_m", w.xi_without_gravity.si()},
          {"d_low_m", w.d_low.si()},
          {"d_high_m", w.d_high.si()},
          {"evaluated_at_s", w.evaluated_at.si()},
          {"ratio", w.ratio},
          {"conclusive", w.conclusive}};
}

Record protocol_summary(const ProtocolTrace& t) {
  Record r;
  const auto& last = t.steps.back();
  r.push_back({"total_time_s", last.elapsed.si()});
  r.push_back({"slit_coherence_length_m", t.slit_coherence_length.si()});
  r.push_back({"slit_separation_m", t.cat.slit_separation.si()});
  r.push_back({"slit_width_m", t.cat.slit_width.si()});
  r.push_back({"slit_feasible", t.verdicts.slit_feasible});
  r.push_back({"slit_wide_warning", t.verdicts.slit_wide_warning});
  r.push_back({"rotation_nonstandard", t.verdicts.rotation_nonstandard});
  r.push_back({"mapping_capped", t.verdicts.mapping_capped});
  r.push_back({"fringe_separation_m", t.pattern.fringe_separation.si()});
  r.push_back({"blur_scale_m", t.pattern.blur_scale.si()});
  r.push_back({"sw_factor", t.post_slit.sw_decay()});
  r.push_back({"visibility", t.final_visibility});
  r.push_back({"evolution_kind", std::string(to_string(t.pattern.kind))});
  return r;
}

std::string trace_csv(const ProtocolTrace& t) {
  std::ostringstream os;
  os << "step,name,potential,duration_s,elapsed_s,gamma_eff_Hz,lambda_eff_Hz_per_m2,sw_factor,"
        "purity,coherence_length_m,v_x_m2,v_p_kg2m2s2,c_kgm2s,fringe_separation_m,blur_scale_m\n";
  for (const auto& s : t.steps) {
    os << s.step << ',' << s.name << ',' << to_string(s.potential) << ',' << format_double(s.duration.si()) << ','
       << format_double(s.elapsed.si()) << ',' << format_double(s.gamma_eff.si()) << ','
       << format_double(s.lambda_eff.si()) << ',' << format_double(s.sw_factor) << ','
       << (s.purity ? format_double(*s.purity) : "") << ',' << opt(s.coherence_length) << ','
       << (s.state ? format_double(s.state->v_x().si()) : "") << ','
       << (s.state ? format_double(s.state->v_p().si()) : "") << ','
       << (s.state ? format_double(s.state->c().si()) : "") << ',' << opt(s.fringe_separation) << ','
       << opt(s.blur_scale) << '\n';
  }
  return os.str();
}

}  // namespace cisim
