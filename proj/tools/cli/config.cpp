#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "sbm/csv.hpp"

namespace sbm::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back({});
  return out;
}

const std::map<std::string, std::set<std::string>>& knownKeys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"domain", {"kind", "period", "half_width"}},
      {"fields",
       {"preset", "alpha_top", "beta_bottom", "lambda", "spin_dim", "g_top", "g_bottom", "g", "alpha", "damping", "tau_top",
        "tau_bottom", "tau"}},
      {"sim",
       {"dt", "horizon", "seed", "chains", "burn_in", "record_stride", "initial_x", "initial_s", "scheme",
        "brownian_substeps"}},
      {"analysis",
       {"histogram", "eps_grid", "compare_density", "b_scale", "identity_points", "jacobian_points", "round_trips",
        "hull_distance"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const IniFile& ini) : ini_(ini) {}

  const IniFile::Entry* find(const std::string& section, const std::string& key) const {
    auto s = ini_.sections.find(section);
    if (s == ini_.sections.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  [[noreturn]] void fail(const IniFile::Entry& e, const std::string& section, const std::string& key,
                         const std::string& why) const {
    throw ConfigError(ini_.source, e.line, section + "." + key + ": " + why);
  }

  double real(const std::string& section, const std::string& key, double fallback, bool required = false) const {
    const auto* e = find(section, key);
    if (!e) {
      if (required) throw ConfigError(ini_.source, 0, "missing required key " + section + "." + key);
      return fallback;
    }
    return parseReal(*e, section, key, e->value);
  }

  std::uint64_t integer(const std::string& section, const std::string& key, std::uint64_t fallback) const {
    const auto* e = find(section, key);
    if (!e) return fallback;
    std::uint64_t v = 0;
    const auto& t = e->value;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) fail(*e, section, key, "expected a non-negative integer");
    return v;
  }

  std::string text(const std::string& section, const std::string& key, const std::string& fallback) const {
    const auto* e = find(section, key);
    return e ? e->value : fallback;
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) const {
    const auto* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "yes" || e->value == "on") return true;
    if (e->value == "false" || e->value == "no" || e->value == "off") return false;
    fail(*e, section, key, "expected true or false");
  }

  std::vector<double> reals(const std::string& section, const std::string& key) const {
    const auto* e = find(section, key);
    if (!e) return {};
    std::vector<double> out;
    for (const auto& part : split(e->value, ',')) out.push_back(parseReal(*e, section, key, part));
    return out;
  }

  double parseReal(const IniFile::Entry& e, const std::string& section, const std::string& key,
                   const std::string& t) const {
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v)) {
      fail(e, section, key, "expected a number, got '" + t + "'");
    }
    return v;
  }

  void require(bool ok, const std::string& section, const std::string& key, const std::string& why) const {
    if (ok) return;
    const auto* e = find(section, key);
    throw ConfigError(ini_.source, e ? e->line : 0, section + "." + key + ": " + why);
  }

 private:
  const IniFile& ini_;
};

}  // namespace

ConfigError::ConfigError(std::string source, int line, const std::string& msg)
    : ValidationError(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + msg), line_(line) {}

IniFile IniFile::parse(std::istream& in, const std::string& source) {
  IniFile ini;
  ini.source = source;
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string t = raw;
    const auto hash = t.find('#');
    if (hash != std::string::npos) t = t.substr(0, hash);
    t = trim(t);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(source, line, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (!knownKeys().count(section)) throw ConfigError(source, line, "unknown section [" + section + "]");
      if (ini.sectionLines.count(section)) throw ConfigError(source, line, "section [" + section + "] repeated");
      ini.sectionLines[section] = line;
      ini.sections[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected key = value");
    if (section.empty()) throw ConfigError(source, line, "key outside of any section");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line, "empty key");
    if (!knownKeys().at(section).count(key)) {
      throw ConfigError(source, line, "unknown key '" + key + "' in [" + section + "]");
    }
    auto& entries = ini.sections[section];
    if (entries.count(key)) throw ConfigError(source, line, "duplicate key '" + key + "'");
    entries[key] = {value, line};
  }
  return ini;
}

IniFile IniFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  return parse(in, path);
}

FourierProfile parseFourier(const std::string& text, int spinDim) {
  FourierProfile prof;
  for (const auto& comp : split(text, ';')) {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    const auto parts = split(comp, ',');
    if (parts.empty() || parts.size() > 3) throw InvalidInput("each component is 'c' or 'c, a, b': " + text);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      auto [p, ec] = std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), c[i]);
      if (parts[i].empty() || ec != std::errc() || p != parts[i].data() + parts[i].size()) {
        throw InvalidInput("bad number '" + parts[i] + "' in " + text);
      }
    }
    prof.components.push_back(c);
  }
  if (prof.dim() != spinDim) throw InvalidInput("profile '" + text + "' does not have spin_dim components");
  return prof;
}

TauProfile parseTau(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = trim(text.substr(0, colon));
  double scale = 1.0;
  if (colon != std::string::npos) {
    const std::string num = trim(text.substr(colon + 1));
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), scale);
    if (num.empty() || ec != std::errc() || p != num.data() + num.size()) {
      throw InvalidInput("bad tau scale in '" + text + "'");
    }
  }
  if (kind == "zero") return TauProfile::zero();
  if (kind == "constant") return TauProfile::constant(scale);
  if (kind == "one-minus-spin-squared") return TauProfile::oneMinusSpinSquared(scale);
  throw InvalidInput("tau must be zero, constant:<v> or one-minus-spin-squared[:<v>], got '" + text + "'");
}

RunConfig interpret(const IniFile& ini) {
  Reader r(ini);
  RunConfig cfg;
  cfg.source = ini.source;

  auto& dom = cfg.domain;
  dom.kind = r.text("domain", "kind", dom.kind);
  r.require(dom.kind == "wristband" || dom.kind == "disk", "domain", "kind", "must be wristband or disk");
  dom.period = r.real("domain", "period", 2.0 * std::numbers::pi);
  dom.halfWidth = r.real("domain", "half_width", 1.0);
  r.require(dom.period > 0.0, "domain", "period", "must be positive");
  r.require(dom.halfWidth > 0.0, "domain", "half_width", "must be positive");

  auto& fl = cfg.fields;
  fl.preset = r.text("fields", "preset", fl.preset);
  r.require(fl.preset == "wristband-1d-spin" || fl.preset == "point-concentration" ||
                fl.preset == "axes-concentration" || fl.preset == "custom",
            "fields", "preset", "unknown preset '" + fl.preset + "'");
  r.require(fl.preset == "custom" || dom.kind == "wristband", "fields", "preset",
            "the named presets live on the wristband");
  fl.alphaTop = r.real("fields", "alpha_top", fl.alphaTop);
  fl.betaBottom = r.real("fields", "beta_bottom", fl.betaBottom);
  fl.lambda = r.real("fields", "lambda", fl.lambda);
  r.require(fl.alphaTop > 0.0, "fields", "alpha_top", "must be positive");
  r.require(fl.betaBottom > 0.0, "fields", "beta_bottom", "must be positive");
  fl.spinDim = static_cast<int>(r.integer("fields", "spin_dim", 0));
  fl.gTop = r.text("fields", "g_top", "");
  fl.gBottom = r.text("fields", "g_bottom", "");
  fl.g = r.text("fields", "g", "");
  r.require(!(r.find("fields", "alpha") && r.find("fields", "damping")), "fields", "damping",
            "give either alpha or damping, not both");
  fl.damping = r.real("fields", "alpha", r.real("fields", "damping", 1.0));
  fl.tauTop = r.text("fields", "tau_top", "zero");
  fl.tauBottom = r.text("fields", "tau_bottom", "zero");
  fl.tau = r.text("fields", "tau", "zero");
  r.require(fl.damping > 0.0, "fields", r.find("fields", "alpha") ? "alpha" : "damping", "must be positive");
  if (fl.preset == "custom") {
    r.require(fl.spinDim >= 1 && fl.spinDim <= 3, "fields", "spin_dim", "custom fields need spin_dim in 1..3");
    if (dom.kind == "wristband") {
      r.require(!fl.gTop.empty(), "fields", "g_top", "required for custom wristband fields");
      r.require(!fl.gBottom.empty(), "fields", "g_bottom", "required for custom wristband fields");
    } else {
      r.require(!fl.g.empty(), "fields", "g", "required for custom disk fields");
    }
    const std::pair<const char*, const std::string*> profiles[] = {{"g_top", &fl.gTop}, {"g_bottom", &fl.gBottom}, {"g", &fl.g}};
    for (const auto& [key, value] : profiles) {
      if (value->empty()) continue;
      try {
        (void)parseFourier(*value, fl.spinDim);
      } catch (const InvalidInput& e) {
        r.require(false, "fields", key, e.what());
      }
    }
    const std::pair<const char*, const std::string*> taus[] = {{"tau_top", &fl.tauTop}, {"tau_bottom", &fl.tauBottom}, {"tau", &fl.tau}};
    for (const auto& [key, value] : taus) {
      try {
        (void)parseTau(*value);
      } catch (const InvalidInput& e) {
        r.require(false, "fields", key, e.what());
      }
    }
  }

  auto& sim = cfg.sim;
  sim.dt = r.real("sim", "dt", 0.0, true);
  sim.horizon = r.real("sim", "horizon", 0.0, true);
  r.require(sim.dt > 0.0, "sim", "dt", "must be positive");
  r.require(sim.horizon > 0.0, "sim", "horizon", "must be positive");
  r.require(sim.dt <= sim.horizon, "sim", "dt", "must not exceed the horizon");
  sim.seed = r.integer("sim", "seed", 0);
  sim.chains = r.integer("sim", "chains", 1);
  r.require(sim.chains >= 1, "sim", "chains", "must be at least 1");
  sim.burnIn = r.real("sim", "burn_in", 0.1 * sim.horizon);
  r.require(sim.burnIn >= 0.0 && sim.burnIn < sim.horizon, "sim", "burn_in", "must lie in [0, horizon)");
  sim.recordStride = r.integer("sim", "record_stride", 1);
  r.require(sim.recordStride >= 1, "sim", "record_stride", "must be at least 1");
  sim.brownianSubsteps = static_cast<int>(r.integer("sim", "brownian_substeps", 1));
  r.require(sim.brownianSubsteps >= 1, "sim", "brownian_substeps", "must be at least 1");
  const std::string scheme = r.text("sim", "scheme", "half-step");
  r.require(scheme == "half-step" || scheme == "naive", "sim", "scheme", "must be half-step or naive");
  sim.scheme = scheme == "naive" ? ReflectionScheme::Naive : ReflectionScheme::HalfStep;

  const int spinDim = fl.preset == "wristband-1d-spin" ? 1 : fl.preset == "custom" ? fl.spinDim : 2;
  sim.initialX = r.reals("sim", "initial_x");
  sim.initialS = r.reals("sim", "initial_s");
  if (sim.initialX.empty()) sim.initialX = {0.0, 0.0};
  if (sim.initialS.empty()) sim.initialS.assign(static_cast<std::size_t>(spinDim), 0.0);
  r.require(sim.initialX.size() == 2, "sim", "initial_x", "needs two coordinates");
  r.require(sim.initialS.size() == static_cast<std::size_t>(spinDim), "sim", "initial_s",
            "needs " + std::to_string(spinDim) + " coordinates");

  auto& an = cfg.analysis;
  const std::string hist = r.text("analysis", "histogram", "");
  if (!hist.empty()) {
    for (const auto& spec : split(hist, ',')) {
      const auto parts = split(spec, ':');
      r.require(parts.size() == 4, "analysis", "histogram", "axes are name:lo:hi:bins separated by commas");
      Axis a;
      a.name = parts[0];
      try {
        (void)Coordinate::parse(a.name);
        a.lo = std::stod(parts[1]);
        a.hi = std::stod(parts[2]);
        a.bins = std::stoul(parts[3]);
      } catch (const std::exception&) {
        r.require(false, "analysis", "histogram", "bad axis '" + spec + "'");
      }
      r.require(a.hi > a.lo && a.bins > 0, "analysis", "histogram", "axis '" + spec + "' needs lo < hi, bins > 0");
      an.axes.push_back(a);
    }
  }
  an.epsGrid = r.reals("analysis", "eps_grid");
  for (double e : an.epsGrid) r.require(e > 0.0, "analysis", "eps_grid", "values must be positive");
  an.compareDensity = r.boolean("analysis", "compare_density", an.compareDensity);
  an.bScale = r.real("analysis", "b_scale", an.bScale);
  r.require(an.bScale > 0.0, "analysis", "b_scale", "must be positive");
  an.identityPoints = r.integer("analysis", "identity_points", an.identityPoints);
  an.jacobianPoints = r.integer("analysis", "jacobian_points", an.jacobianPoints);
  an.roundTrips = r.integer("analysis", "round_trips", an.roundTrips);
  an.hullDistance = r.real("analysis", "hull_distance", an.hullDistance);
  r.require(an.identityPoints >= 2, "analysis", "identity_points", "must be at least 2");
  return cfg;
}

RunConfig loadConfig(const std::string& path) { return interpret(IniFile::load(path)); }

namespace {

std::string joinReals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + formatReal(v[i]);
  return out;
}

}  // namespace

void RunConfig::echo(std::ostream& out) const {
  out << "[domain]\nkind = " << domain.kind << "\nperiod = " << formatReal(domain.period)
      << "\nhalf_width = " << formatReal(domain.halfWidth) << "\n";
  out << "[fields]\npreset = " << fields.preset << "\n";
  if (fields.preset == "wristband-1d-spin") {
    out << "alpha_top = " << formatReal(fields.alphaTop) << "\nbeta_bottom = " << formatReal(fields.betaBottom)
        << "\nlambda = " << formatReal(fields.lambda) << "\n";
  } else if (fields.preset == "custom") {
    out << "spin_dim = " << fields.spinDim << "\n";
    if (domain.kind == "wristband") {
      out << "g_top = " << fields.gTop << "\ng_bottom = " << fields.gBottom << "\ntau_top = " << fields.tauTop
          << "\ntau_bottom = " << fields.tauBottom << "\n";
    } else {
      out << "g = " << fields.g << "\ntau = " << fields.tau << "\n";
    }
    out << "alpha = " << formatReal(fields.damping) << "\n";
  }
  out << "[sim]\ndt = " << formatReal(sim.dt) << "\nhorizon = " << formatReal(sim.horizon) << "\nseed = " << sim.seed
      << "\nchains = " << sim.chains << "\nburn_in = " << formatReal(sim.burnIn)
      << "\nrecord_stride = " << sim.recordStride << "\ninitial_x = " << joinReals(sim.initialX)
      << "\ninitial_s = " << joinReals(sim.initialS)
      << "\nscheme = " << (sim.scheme == ReflectionScheme::Naive ? "naive" : "half-step")
      << "\nbrownian_substeps = " << sim.brownianSubsteps << "\n";
  out << "[analysis]\nhistogram = ";
  const auto axes = histogramAxes(*this);
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto& a = axes[i];
    out << (i ? ", " : "") << a.name << ':' << formatReal(a.lo) << ':' << formatReal(a.hi) << ':' << a.bins;
  }
  out << "\neps_grid = " << joinReals(analysis.epsGrid) << "\ncompare_density = "
      << (analysis.compareDensity ? "true" : "false") << "\nb_scale = " << formatReal(analysis.bScale)
      << "\nidentity_points = " << analysis.identityPoints << "\njacobian_points = " << analysis.jacobianPoints
      << "\nround_trips = " << analysis.roundTrips << "\nhull_distance = " << formatReal(analysis.hullDistance)
      << "\n";
}

Domain buildDomain(const RunConfig& cfg) {
  if (cfg.domain.kind == "disk") return Domain::unitDisk();
  return Domain::wristband(cfg.domain.period, cfg.domain.halfWidth);
}

FieldSet buildFields(const RunConfig& cfg, const Domain& d) {
  const auto& fl = cfg.fields;
  if (fl.preset == "wristband-1d-spin") {
    return presets::wristbandOneDimSpin(d, fl.alphaTop, fl.betaBottom, fl.lambda);
  }
  if (fl.preset == "point-concentration") return presets::pointConcentration(d);
  if (fl.preset == "axes-concentration") return presets::axesConcentration(d);
  if (d.isWristband()) {
    return wristbandFields(d, parseFourier(fl.gTop, fl.spinDim), parseFourier(fl.gBottom, fl.spinDim), fl.damping,
                           parseTau(fl.tauTop), parseTau(fl.tauBottom), "custom");
  }
  return angularFields(d, parseFourier(fl.g, fl.spinDim), fl.damping, parseTau(fl.tau), "custom");
}

SimConfig chainConfig(const RunConfig& cfg, std::size_t chain) {
  SimConfig sc;
  sc.dt = cfg.sim.dt;
  sc.horizon = cfg.sim.horizon;
  sc.seed = cfg.sim.seed + chain;
  sc.burnIn = cfg.sim.burnIn;
  sc.recordStride = cfg.sim.recordStride;
  sc.scheme = cfg.sim.scheme;
  sc.brownianSubsteps = cfg.sim.brownianSubsteps;
  sc.initialX = Vec(static_cast<Eigen::Index>(cfg.sim.initialX.size()));
  for (std::size_t i = 0; i < cfg.sim.initialX.size(); ++i) sc.initialX[static_cast<Eigen::Index>(i)] = cfg.sim.initialX[i];
  sc.initialS = Vec(static_cast<Eigen::Index>(cfg.sim.initialS.size()));
  for (std::size_t i = 0; i < cfg.sim.initialS.size(); ++i) sc.initialS[static_cast<Eigen::Index>(i)] = cfg.sim.initialS[i];
  return sc;
}

std::vector<Axis> histogramAxes(const RunConfig& cfg) {
  if (!cfg.analysis.axes.empty()) return cfg.analysis.axes;
  const auto& fl = cfg.fields;
  if (fl.preset == "wristband-1d-spin") {
    return {{"x2", -cfg.domain.halfWidth, cfg.domain.halfWidth, 20}, {"s1", -fl.betaBottom, fl.alphaTop, 20}};
  }
  if (fl.preset == "custom" && fl.spinDim == 1) {
    return {{"x2", -cfg.domain.halfWidth, cfg.domain.halfWidth, 20}, {"s1", -1.0, 1.0, 20}};
  }
  return {{"s1", -1.0, 1.0, 40}, {"s2", -1.0, 1.0, 40}};
}

}  // namespace sbm::cli
