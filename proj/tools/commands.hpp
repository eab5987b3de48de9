#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace rne::cli {

/// Runs one `rne` invocation; `args` excludes the program name. Returns the
/// process exit status.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace rne::cli
