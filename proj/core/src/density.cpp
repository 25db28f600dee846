#include "sbm/density.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

#include "sbm/error.hpp"

namespace sbm {

WristbandDensity::WristbandDensity(double alphaTop, double betaBottom, double bScale)
    : alpha_(alphaTop), beta_(betaBottom), bScale_(bScale) {
  if (!(alpha_ > 0.0) || !(beta_ > 0.0) || !std::isfinite(alpha_) || !std::isfinite(beta_)) {
    throw InvalidInput("density parameters must be positive");
  }
  if (!(bScale_ > 0.0)) throw InvalidInput("b scale must be positive");
  // The y-integral of a(s) y vanishes, so the normaliser is 2 times the integral of b.
  boost::math::quadrature::tanh_sinh<double> quad;
  // The two-argument form hands over the distance to the nearer endpoint, which avoids cancellation
  // in (alpha - s)(beta + s) where the integrand blows up.
  auto integrand = [this](double s, double xc) {
    const double below = xc <= 0.0 ? -xc : beta_ + s;
    const double above = xc <= 0.0 ? alpha_ - s : xc;
    return bScale_ / std::sqrt(below * above);
  };
  normalizer_ = 2.0 * quad.integrate(integrand, -beta_, alpha_, 1e-15);
}

double WristbandDensity::a(double s) const {
  const double c = 0.5 * (alpha_ - beta_);
  return (2.0 / (alpha_ + beta_)) * (s - c) / std::sqrt((alpha_ - s) * (beta_ + s));
}

double WristbandDensity::b(double s) const { return bScale_ / std::sqrt((alpha_ - s) * (beta_ + s)); }

double WristbandDensity::unnormalized(double y, double s) const {
  if (s < -beta_ || s > alpha_) return 0.0;
  if (s == -beta_ || s == alpha_) return std::numeric_limits<double>::infinity();
  return a(s) * y + b(s);
}

// (alpha - s)(beta + s) = R^2 - (s - c)^2 with c = (alpha - beta)/2, R = (alpha + beta)/2.
double WristbandDensity::primitiveA(double s) const {
  const double q = std::max(0.0, (alpha_ - s) * (beta_ + s));
  return -(2.0 / (alpha_ + beta_)) * std::sqrt(q);
}

double WristbandDensity::primitiveB(double s) const {
  const double c = 0.5 * (alpha_ - beta_);
  const double r = 0.5 * (alpha_ + beta_);
  return bScale_ * std::asin(std::clamp((s - c) / r, -1.0, 1.0));
}

double WristbandDensity::cellMass(double y0, double y1, double s0, double s1) const {
  y0 = std::clamp(y0, -1.0, 1.0);
  y1 = std::clamp(y1, -1.0, 1.0);
  s0 = std::clamp(s0, -beta_, alpha_);
  s1 = std::clamp(s1, -beta_, alpha_);
  if (!(y1 > y0) || !(s1 > s0)) return 0.0;
  const double ia = primitiveA(s1) - primitiveA(s0);
  const double ib = primitiveB(s1) - primitiveB(s0);
  return (0.5 * (y1 * y1 - y0 * y0) * ia + (y1 - y0) * ib) / normalizer_;
}

std::vector<double> WristbandDensity::cellMasses(const OccupancyHistogram& h) const {
  if (h.axes().size() != 2) throw InvalidInput("density comparison needs a (y, s) histogram");
  const Axis& ya = h.axes()[0];
  const Axis& sa = h.axes()[1];
  std::vector<double> out(h.cellCount());
  for (std::size_t i = 0; i < ya.bins; ++i) {
    for (std::size_t j = 0; j < sa.bins; ++j) {
      out[h.flatIndex({i, j})] = cellMass(ya.edge(i), ya.edge(i + 1), sa.edge(j), sa.edge(j + 1));
    }
  }
  return out;
}

std::vector<std::size_t> singularCornerCells(const OccupancyHistogram& h, const WristbandDensity& dens) {
  if (h.axes().size() != 2) throw InvalidInput("density comparison needs a (y, s) histogram");
  const Axis& ya = h.axes()[0];
  const Axis& sa = h.axes()[1];
  const double corners[2][2] = {{1.0, dens.alphaTop()}, {-1.0, -dens.betaBottom()}};
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ya.bins; ++i) {
    for (std::size_t j = 0; j < sa.bins; ++j) {
      for (const auto& c : corners) {
        if (c[0] >= ya.edge(i) && c[0] <= ya.edge(i + 1) && c[1] >= sa.edge(j) && c[1] <= sa.edge(j + 1)) {
          out.push_back(h.flatIndex({i, j}));
          break;
        }
      }
    }
  }
  return out;
}

DensityComparison compareToDensity(const OccupancyHistogram& h, const WristbandDensity& dens) {
  if (h.axes().size() != 2) throw InvalidInput("density comparison needs a (y, s) histogram");
  if (!(h.totalWeight() > 0.0)) throw InsufficientData("empty histogram");
  const Axis& ya = h.axes()[0];
  const Axis& sa = h.axes()[1];
  if (ya.lo < -1.0 || ya.hi > 1.0 || sa.lo < -dens.betaBottom() || sa.hi > dens.alphaTop()) {
    throw InvalidInput("histogram axes must lie within [-1, 1] x [-beta, alpha]");
  }
  DensityComparison out;
  out.cornerCells = singularCornerCells(h, dens);
  const auto est = h.masses();
  const auto exact = dens.cellMasses(h);
  out.perCell.resize(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    out.perCell[i] = std::abs(est[i] - exact[i]);
    const bool corner = std::find(out.cornerCells.begin(), out.cornerCells.end(), i) != out.cornerCells.end();
    (corner ? out.cornerL1 : out.l1) += out.perCell[i];
  }
  return out;
}

bool DensityIdentityReport::passed() const {
  return std::all_of(families.begin(), families.end(), [](const IdentityFamily& f) { return f.passed; });
}

namespace {

void record(IdentityFamily& fam, double err, double y, double s) {
  ++fam.points;
  // NaN counts as the worst possible error.
  if (fam.points == 1 || !(err <= fam.worstError)) {
    fam.worstError = err;
    fam.worstY = y;
    fam.worstS = s;
  }
  if (!(err <= fam.tolerance)) fam.passed = false;
}

}  // namespace

DensityIdentityReport verifyDensityIdentities(const WristbandDensity& dens, const std::vector<double>& sGrid,
                                              double tol) {
  const double al = dens.alphaTop();
  const double be = dens.betaBottom();
  for (double s : sGrid) {
    if (!(s > -be && s < al)) throw InvalidInput("s grid must lie inside (-beta, alpha)");
  }
  auto flux = [&](double y, double s) { return ((y > 0 ? al : -be) - s) * dens.unnormalized(y, s); };
  auto closedForm = [&](double y, double s) {
    return (y > 0 ? 2.0 : -2.0) / (al + be) * std::sqrt((al - s) * (be + s));
  };

  IdentityFamily fluxFam{"flux", true, 0.0, 0.0, 0.0, tol, 0};
  IdentityFamily vanishFam{"vanishing", true, 0.0, 0.0, 0.0, tol, 0};
  IdentityFamily derivFam{"derivative", true, 0.0, 0.0, 0.0, tol, 0};

  constexpr double h = 1e-6;
  for (double y : {1.0, -1.0}) {
    const double sg = y > 0 ? 1.0 : -1.0;
    for (double s : sGrid) {
      const double rhs = closedForm(y, s);
      record(fluxFam, std::abs(flux(y, s) - rhs) / std::max(1.0, std::abs(rhs)), y, s);
      if (s - h > -be && s + h < al) {
        const double fd = (flux(y, s + h) - flux(y, s - h)) / (2.0 * h);
        const double want = -sg * dens.a(s);
        record(derivFam, std::abs(fd - want) / std::max(1.0, std::abs(want)), y, s);
      }
    }
    // Approach both ends of the spin range; the flux must follow the square-root envelope down to 0.
    for (double end : {al, -be}) {
      double previous = std::numeric_limits<double>::infinity();
      for (int k = 2; k <= 12; ++k) {
        const double step = (al + be) * std::pow(10.0, -k);
        const double s = end == al ? al - step : -be + step;
        const double value = std::abs(flux(y, s));
        double err = std::abs(value - std::abs(closedForm(y, s)));
        if (!(value < previous)) err = std::max(err, value - previous + tol * 10.0);
        previous = value;
        record(vanishFam, err, y, s);
      }
    }
  }
  DensityIdentityReport report;
  report.families = {fluxFam, vanishFam, derivFam};
  return report;
}

}  // namespace sbm
