#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace cisim {

using nlohmann::json;

namespace {

// One JSON object of the config; records which keys were read so that typos
// surface as errors instead of silently falling back to defaults.
class Section {
 public:
  Section(const json* j, std::string name) : j_(j), name_(std::move(name)) {
    if (j_ && !j_->is_object()) fail("must be an object");
  }

  bool present() const { return j_ != nullptr; }

  template <class Q>
  std::optional<Q> quantity(std::string_view base) {
    if (!j_) return std::nullopt;
    const std::string prefix = std::string(base) + "_";
    std::optional<Q> out;
    for (const auto& [key, value] : j_->items()) {
      if (key.rfind(prefix, 0) != 0) continue;
      const std::string unit = key.substr(prefix.size());
      PhysicalQuantity q;
      try {
        q = from_unit(number_of(key, value), unit);
      } catch (const UnitError& e) {
        fail("key '" + key + "': " + e.what());
      }
      if (q.dimension != Q::dimension) fail("key '" + key + "' has the wrong unit for " + std::string(base));
      if (out) fail("'" + std::string(base) + "' given more than once");
      out = Q{q.value};
      used_.insert(key);
    }
    return out;
  }

  std::optional<double> number(const std::string& key) {
    if (!j_ || !j_->contains(key)) return std::nullopt;
    used_.insert(key);
    return number_of(key, j_->at(key));
  }

  std::optional<bool> boolean(const std::string& key) {
    if (!j_ || !j_->contains(key)) return std::nullopt;
    used_.insert(key);
    const auto& v = j_->at(key);
    if (!v.is_boolean()) fail("key '" + key + "' must be true or false");
    return v.get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    if (!j_ || !j_->contains(key)) return std::nullopt;
    used_.insert(key);
    const auto& v = j_->at(key);
    if (!v.is_string()) fail("key '" + key + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    if (!j_ || !j_->contains(key)) return out;
    used_.insert(key);
    const auto& v = j_->at(key);
    if (!v.is_array()) fail("key '" + key + "' must be an array of numbers");
    for (const auto& e : v) out.push_back(number_of(key, e));
    return out;
  }

  const json* raw(const std::string& key) {
    if (!j_ || !j_->contains(key)) return nullptr;
    used_.insert(key);
    return &j_->at(key);
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    const auto v = number(key);
    if (!v) return fallback;
    if (*v < 0.0 || std::floor(*v) != *v || *v > 1e12) fail("key '" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(*v);
  }

  void finish() const {
    if (!j_) return;
    for (const auto& [key, value] : j_->items())
      if (!used_.count(key)) fail("unknown key '" + key + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(name_ + ": " + msg); }

 private:
  double number_of(const std::string& key, const json& v) const {
    if (!v.is_number()) fail("key '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail("key '" + key + "' must be finite");
    return x;
  }

  const json* j_;
  std::string name_;
  std::set<std::string> used_;
};

const json* child(const json& doc, const char* key) {
  return doc.contains(key) ? &doc.at(key) : nullptr;
}

// omega_<unit> is angular (1/s); frequency_<unit> is cyclic and multiplied by 2 pi.
std::optional<Rate> angular_frequency(Section& s) {
  const auto omega = s.quantity<Rate>("omega");
  const auto freq = s.quantity<Rate>("frequency");
  if (omega && freq) s.fail("give either omega or frequency, not both");
  if (freq) return 2.0 * kPi * *freq;
  return omega;
}

PotentialSegment parse_segment(const json& j, std::size_t index) {
  Section s(&j, "segments[" + std::to_string(index) + "]");
  const auto kind = s.string("kind");
  if (!kind) s.fail("missing 'kind'");
  const auto omega = angular_frequency(s).value_or(Rate{0.0});
  const auto duration = s.quantity<Time>("duration");
  if (!duration) s.fail("missing duration");
  const auto lw = s.quantity<LocalizationRate>("lambda").value_or(LocalizationRate{0.0});
  const auto sw = s.quantity<Rate>("gamma").value_or(Rate{0.0});
  s.finish();
  try {
    if (*kind == "free") return PotentialSegment::free(*duration, lw, sw);
    if (*kind == "harmonic") return PotentialSegment::harmonic(omega, *duration, lw, sw);
    if (*kind == "inverted") return PotentialSegment::inverted(omega, *duration, lw, sw);
  } catch (const DomainError& e) {
    s.fail(e.what());
  }
  s.fail("unknown kind '" + *kind + "'");
}

SweepSpec parse_sweep(const json& j, const json& doc) {
  Section s(&j, "sweep");
  SweepSpec spec;
  if (const auto target = s.string("target")) {
    const auto cmd = parse_subcommand(*target);
    if (!cmd || (*cmd != Subcommand::Budget && *cmd != Subcommand::Falsify && *cmd != Subcommand::Protocol))
      s.fail("target must be budget, falsify or protocol");
    spec.target = *cmd;
  }
  spec.max_points = s.count("max_points", spec.max_points);
  const json* axes = s.raw("axes");
  if (!axes || !axes->is_array() || axes->empty()) s.fail("needs a non-empty 'axes' array");
  for (std::size_t i = 0; i < axes->size(); ++i) {
    Section a(&axes->at(i), "sweep.axes[" + std::to_string(i) + "]");
    SweepAxis axis;
    const auto key = a.string("key");
    if (!key) a.fail("missing 'key'");
    axis.key = *key;
    const auto start = a.number("start"), stop = a.number("stop");
    if (!start || !stop) a.fail("needs 'start' and 'stop'");
    axis.start = *start;
    axis.stop = *stop;
    axis.count = a.count("count", 0);
    if (axis.count < 1) a.fail("count must be at least 1");
    const auto spacing = a.string("spacing").value_or("linear");
    if (spacing != "linear" && spacing != "log") a.fail("spacing must be linear or log");
    axis.log = spacing == "log";
    if (axis.log && !(axis.start > 0.0 && axis.stop > 0.0)) a.fail("log spacing needs positive bounds");
    a.finish();
    // The key must name an existing numeric entry.
    json probe = doc;
    set_config_number(probe, axis.key, axis.start);
    spec.axes.push_back(axis);
  }
  s.finish();
  return spec;
}

}  // namespace

std::optional<Subcommand> parse_subcommand(std::string_view name) {
  if (name == "coherence") return Subcommand::Coherence;
  if (name == "ci-gain") return Subcommand::CiGain;
  if (name == "fringes") return Subcommand::Fringes;
  if (name == "protocol") return Subcommand::Protocol;
  if (name == "budget") return Subcommand::Budget;
  if (name == "falsify") return Subcommand::Falsify;
  if (name == "sweep") return Subcommand::Sweep;
  return std::nullopt;
}

std::string_view to_string(Subcommand cmd) {
  switch (cmd) {
    case Subcommand::Coherence: return "coherence";
    case Subcommand::CiGain: return "ci-gain";
    case Subcommand::Fringes: return "fringes";
    case Subcommand::Protocol: return "protocol";
    case Subcommand::Budget: return "budget";
    case Subcommand::Falsify: return "falsify";
    case Subcommand::Sweep: return "sweep";
  }
  return "budget";
}

double SweepAxis::value(std::size_t i) const {
  if (count <= 1) return start;
  if (i + 1 == count) return stop;
  const double f = static_cast<double>(i) / static_cast<double>(count - 1);
  if (log) return std::exp(std::log(start) + f * (std::log(stop) - std::log(start)));
  return start + f * (stop - start);
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ParseError("config: top level must be an object");
  static const std::set<std::string> kSections = {
      "sphere", "trap", "inflator", "environment", "slit", "protocol", "sources", "grid", "coherence",
      "ci_gain", "fringes", "segments", "sweep", "output", "margin", "cap_omega_t", "workers"};
  for (const auto& [key, value] : doc.items())
    if (!kSections.count(key)) throw ParseError("config: unknown section '" + key + "'");

  RunConfig cfg;
  cfg.raw = doc;
  auto& plan = cfg.plan;

  Section sphere(child(doc, "sphere"), "sphere");
  if (auto r = sphere.quantity<Length>("radius")) plan.sphere.radius = *r;
  if (auto rho = sphere.quantity<Density>("density")) plan.sphere.density = *rho;
  sphere.finish();

  Section trap(child(doc, "trap"), "trap");
  if (auto w = angular_frequency(trap)) plan.omega0 = *w;
  trap.finish();

  Section inflator(child(doc, "inflator"), "inflator");
  if (auto w = angular_frequency(inflator)) plan.omega_inverted = *w;
  cfg.t_inflate = inflator.quantity<Time>("t_inflate");
  if (cfg.t_inflate) plan.t_inflate = *cfg.t_inflate;
  inflator.finish();

  Section env(child(doc, "environment"), "environment");
  if (auto t = env.quantity<Temperature>("temperature")) plan.env.temperature = *t;
  if (auto p = env.quantity<Pressure>("pressure")) plan.env.pressure = *p;
  if (auto m = env.quantity<Mass>("gas_mass")) plan.env.gas_mass = *m;
  if (auto x = env.number("chi_real")) plan.env.chi_real = *x;
  if (auto x = env.number("chi_imag")) plan.env.chi_imag = *x;
  if (auto s = env.quantity<Psd>("vibration_psd")) plan.env.vibration_psd = *s;
  env.finish();

  Section slit(child(doc, "slit"), "slit");
  if (auto d = slit.quantity<Length>("separation")) plan.slit_separation = *d;
  plan.slit_width = slit.quantity<Length>("width");
  slit.finish();

  Section proto(child(doc, "protocol"), "protocol");
  if (auto t = proto.quantity<Time>("free_time")) {
    plan.free_time = *t;
    cfg.free_time_given = true;
  }
  plan.rotation_override = proto.quantity<Time>("rotation_time");
  plan.mapping_duration = proto.quantity<Time>("mapping_duration");
  if (auto x = proto.quantity<Length>("detectable_fringe")) plan.detectable_fringe = *x;
  if (auto t = proto.quantity<Time>("drift_time")) plan.detection_drift = *t;
  plan.traverse_speed = proto.quantity<Velocity>("speed");
  proto.finish();

  Section src(child(doc, "sources"), "sources");
  if (auto b = src.boolean("air")) plan.sources.air = *b;
  if (auto b = src.boolean("bb_scatter")) plan.sources.bb_scatter = *b;
  if (auto b = src.boolean("bb_emit_absorb")) plan.sources.bb_emit_absorb = *b;
  if (auto b = src.boolean("vibration")) plan.sources.vibration = *b;
  if (auto b = src.boolean("gravity")) plan.sources.gravity = *b;
  src.finish();

  Section grid(child(doc, "grid"), "grid");
  plan.grid.points = grid.count("points", plan.grid.points);
  plan.grid.half_width = grid.quantity<Length>("half_width");
  if (auto x = grid.number("min_samples_per_fringe")) plan.grid.min_samples_per_fringe = *x;
  grid.finish();

  if (const json* c = child(doc, "coherence")) {
    Section s(c, "coherence");
    ReducedSpec r;
    r.lambda_tilde = s.numbers("lambda_tilde");
    if (r.lambda_tilde.empty()) s.fail("needs a non-empty 'lambda_tilde' array");
    for (double l : r.lambda_tilde)
      if (!(l > 0.0)) s.fail("lambda_tilde values must be positive");
    if (auto x = s.number("t_min_reduced")) r.t_min = *x;
    if (auto x = s.number("t_max_reduced")) r.t_max = *x;
    r.samples = s.count("samples", r.samples);
    r.g_x = s.number("g_x");
    r.g_p = s.number("g_p");
    if (r.g_x.has_value() != r.g_p.has_value()) s.fail("give both g_x and g_p");
    if (r.g_x && !(*r.g_x >= 1.0 && *r.g_p >= 1.0)) s.fail("gains must be >= 1");
    if (r.samples < 2) s.fail("samples must be at least 2");
    if (!(r.t_min > 0.0) || (r.t_max != 0.0 && !(r.t_max > r.t_min))) s.fail("need 0 < t_min_reduced < t_max_reduced");
    s.finish();
    cfg.reduced = r;
  }

  Section ci(child(doc, "ci_gain"), "ci_gain");
  cfg.ci_gain_times = ci.numbers("t_inflate_s");
  ci.finish();

  Section fr(child(doc, "fringes"), "fringes");
  if (auto e = fr.string("evolution")) {
    if (*e == "free") cfg.fringes.evolution = EvolutionKind::FreeExpansion;
    else if (*e == "ci") cfg.fringes.evolution = EvolutionKind::CiExpansion;
    else fr.fail("evolution must be free or ci");
  }
  if (auto t = fr.quantity<Time>("time")) cfg.fringes.time = *t;
  cfg.fringes.lambda_loc = fr.quantity<LocalizationRate>("lambda");
  fr.finish();

  if (const json* segs = child(doc, "segments")) {
    if (!segs->is_array()) throw ParseError("segments: must be an array");
    for (std::size_t i = 0; i < segs->size(); ++i) cfg.segments.push_back(parse_segment(segs->at(i), i));
  }

  Section out(child(doc, "output"), "output");
  cfg.timeline_samples = out.count("timeline_samples", cfg.timeline_samples);
  if (auto b = out.boolean("log_spacing")) cfg.log_spacing = *b;
  out.finish();
  if (cfg.timeline_samples < 2) throw ParseError("output: timeline_samples must be at least 2");

  if (doc.contains("margin")) {
    const auto& v = doc.at("margin");
    if (!v.is_number() || !(v.get<double>() > 0.0)) throw ParseError("margin must be a positive number");
    cfg.margin = v.get<double>();
  }
  if (doc.contains("cap_omega_t")) {
    const auto& v = doc.at("cap_omega_t");
    if (!v.is_number() || !(v.get<double>() > 0.0)) throw ParseError("cap_omega_t must be a positive number");
    plan.cap_omega_t = v.get<double>();
  }
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  if (doc.contains("workers")) {
    const auto& v = doc.at("workers");
    if (!v.is_number_integer() || v.get<long long>() < 1) throw ParseError("workers must be a positive integer");
    cfg.workers = static_cast<unsigned>(v.get<long long>());
  }

  if (const json* sw = child(doc, "sweep")) cfg.sweep = parse_sweep(*sw, doc);
  return cfg;
}

RunConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void set_config_number(json& doc, std::string_view dotted_key, double value) {
  json* node = &doc;
  std::string_view rest = dotted_key;
  while (true) {
    const auto dot = rest.find('.');
    const std::string part(rest.substr(0, dot));
    if (!node->is_object() || !node->contains(part))
      throw ParseError("config key '" + std::string(dotted_key) + "' does not exist");
    node = &node->at(part);
    if (dot == std::string_view::npos) break;
    rest = rest.substr(dot + 1);
  }
  if (!node->is_number()) throw ParseError("config key '" + std::string(dotted_key) + "' is not numeric");
  *node = value;
}

}  // namespace cisim
