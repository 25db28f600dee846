#include "sbm/csv.hpp"

#include <array>
#include <charconv>
#include <ostream>

#include "sbm/integrator.hpp"

namespace sbm {

std::string formatReal(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string formatReal17(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

std::string formatVec(const Vec& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += formatReal(v[i]);
  }
  return out + ")";
}

void writeTrajectoryCsv(std::ostream& out, const Trajectory& traj) {
  const Eigen::Index n = traj.positions.empty() ? 0 : traj.positions.front().size();
  const Eigen::Index p = traj.spins.empty() ? 0 : traj.spins.front().size();
  out << "t";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
  for (Eigen::Index i = 1; i <= p; ++i) out << ",s" << i;
  out << ",L";
  if (traj.hasWallLocalTimes()) out << ",L_top,L_bottom";
  out << '\n';
  std::string row;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    row = formatReal17(traj.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) (row += ',') += formatReal17(traj.positions[k][i]);
    for (Eigen::Index i = 0; i < p; ++i) (row += ',') += formatReal17(traj.spins[k][i]);
    (row += ',') += formatReal17(traj.localTime[k]);
    if (traj.hasWallLocalTimes()) {
      (row += ',') += formatReal17(traj.localTimeTop[k]);
      (row += ',') += formatReal17(traj.localTimeBottom[k]);
    }
    row += '\n';
    out << row;
  }
}

}  // namespace sbm
