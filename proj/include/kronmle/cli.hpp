#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kronmle {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitDegenerate = 2,
  kExitMleNotExists = 3,
  kExitBadArguments = 4,
};

// Entry point of the kronmle command line tool; `args` excludes the program
// name. Subcommands: sample, mle, verify-lemma, mldegree, multiplicity.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses "2-5", "2,3,7" or "4" into an ascending list.
std::vector<std::size_t> parse_range(const std::string& text);

// Worker count for the table driver: KRONMLE_WORKERS when set and positive,
// otherwise the hardware concurrency, never more than `cells`.
std::size_t worker_count(std::size_t cells);

}  // namespace kronmle
