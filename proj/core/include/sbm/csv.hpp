#pragma once

#include <iosfwd>
#include <string>

#include "sbm/linalg.hpp"

namespace sbm {

struct Trajectory;

/// Shortest round-trippable text of a double, at most 17 significant digits.
std::string formatReal(double v);
/// Fixed 17 significant digits, used for trajectory exports.
std::string formatReal17(double v);
/// "(a, b, ...)" with formatReal components.
std::string formatVec(const Vec& v);

/// Header `t,x1..xn,s1..sp,L[,L_top,L_bottom]`, one row per record.
void writeTrajectoryCsv(std::ostream& out, const Trajectory& traj);

}  // namespace sbm
