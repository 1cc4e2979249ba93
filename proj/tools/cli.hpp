#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace iissqda::cli {

/// Exit codes: 0 success, 1 runtime error, 2 usage error,
/// 3 benchmark finished but some method failed on some replication.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iissqda::cli
