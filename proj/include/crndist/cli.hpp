#ifndef CRNDIST_CLI_HPP
#define CRNDIST_CLI_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "crndist/analysis.hpp"
#include "crndist/ssa.hpp"

namespace crndist {

// Exit codes: 0 success/verified, 1 verification failed, 2 input error,
// 3 resource cap exceeded.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

// Line-oriented and JSON serializations shared by the CLI and the tests.
std::string steady_report_text(const StateSpace& space, const SteadyReport& report);
std::string steady_report_json(const StateSpace& space, const SteadyReport& report);
std::string trajectory_text(const TrajectoryStats& stats);
std::string trajectory_json(const TrajectoryStats& stats);
std::string occupation_text(const std::string& species, const std::map<Count, double>& pmf);

} // namespace crndist

#endif
