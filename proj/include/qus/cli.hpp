#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qus::cli {

// Exit codes: 0 query answered (a negative answer is still an answer),
// 1 usage, 2 parse/validation, 3 internal invariant breach.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qus::cli
