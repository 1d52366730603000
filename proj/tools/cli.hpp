#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wapshop::cli {

/// Runs one command line (args excludes the program name). Exit status:
/// 0 success, 1 lint violations or failed journey expectations, 2 usage or
/// I/O errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wapshop::cli
