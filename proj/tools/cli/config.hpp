#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbm/domain.hpp"
#include "sbm/error.hpp"
#include "sbm/fields.hpp"
#include "sbm/histogram.hpp"
#include "sbm/integrator.hpp"

namespace sbm::cli {

/// Config problem tied to a line of the source (0 when the problem is a missing key).
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string source, int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

/// Raw `[section]` / `key = value` contents with line numbers.
struct IniFile {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string source;
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::map<std::string, int> sectionLines;

  static IniFile parse(std::istream& in, const std::string& source);
  static IniFile load(const std::string& path);
};

struct DomainBlock {
  std::string kind = "wristband";  // wristband | disk
  double period = 0.0;             // 0 means 2 pi
  double halfWidth = 1.0;
};

struct FieldsBlock {
  /// wristband-1d-spin | point-concentration | axes-concentration | custom
  std::string preset = "wristband-1d-spin";
  double alphaTop = 1.0;
  double betaBottom = 1.0;
  double lambda = 1.0;
  // custom fields
  int spinDim = 0;
  std::string gTop, gBottom, g;
  double damping = 1.0;
  std::string tauTop = "zero", tauBottom = "zero", tau = "zero";
};

struct SimBlock {
  double dt = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::size_t chains = 1;
  double burnIn = -1.0;  // negative: 10% of the horizon
  std::size_t recordStride = 1;
  std::vector<double> initialX;
  std::vector<double> initialS;
  ReflectionScheme scheme = ReflectionScheme::HalfStep;
  int brownianSubsteps = 1;
};

struct AnalysisBlock {
  std::vector<Axis> axes;
  std::vector<double> epsGrid;
  bool compareDensity = true;
  double bScale = 1.0;
  std::size_t identityPoints = 1000;
  std::size_t jacobianPoints = 50;
  std::size_t roundTrips = 100;
  double hullDistance = 0.05;
};

struct RunConfig {
  std::string source;
  DomainBlock domain;
  FieldsBlock fields;
  SimBlock sim;
  AnalysisBlock analysis;

  /// Effective settings, defaults included, as `key = value` lines.
  void echo(std::ostream& out) const;
};

/// Validates an IniFile into a RunConfig. Unknown sections or keys, malformed values and
/// missing required keys raise ConfigError.
RunConfig interpret(const IniFile& ini);
RunConfig loadConfig(const std::string& path);

Domain buildDomain(const RunConfig& cfg);
FieldSet buildFields(const RunConfig& cfg, const Domain& d);
/// Simulation settings of chain `chain` (seed + chain).
SimConfig chainConfig(const RunConfig& cfg, std::size_t chain);
/// The configured axes, or a default 20 x 20 grid suited to the preset.
std::vector<Axis> histogramAxes(const RunConfig& cfg);

FourierProfile parseFourier(const std::string& text, int spinDim);
TauProfile parseTau(const std::string& text);

}  // namespace sbm::cli
