#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "growthlab/dynamics.hpp"

namespace growthlab::cli {

// Exit codes: 0 success, 1 validation error, 2 verification failure,
// 3 numerical failure, 64 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitVerification = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitUsage = 64;

// Entry point behind main(). args excludes argv[0]. All regular output goes
// to out (or files given by flags), diagnostics to err. Output is
// deterministic: fixed evaluation order, numbers at 17 significant digits.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Header "t,c,k,h,u,z,lambda,mu"; numeric trajectories append a provenance
// column.
void emit_trajectory_csv(std::ostream& os, const Trajectory& traj,
                         bool provenance_column);

// Long format "series,t,variable,value". Variables are column names or
// "growth_<name>" for central-difference log-slopes (interior grid points
// only; plain u uses the level, growth_u the log-slope).
void emit_plotdata(std::ostream& os,
                   const std::vector<std::pair<std::string, const Trajectory*>>& series,
                   const std::vector<std::string>& variables);

}  // namespace growthlab::cli
