#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace risradar::cli {

// Batch front end. args excludes argv[0]. Returns the process exit status:
// 0 success, 1 usage/config/runtime error, 2 validation checks failed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace risradar::cli
