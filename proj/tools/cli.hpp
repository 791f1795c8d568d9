#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mathlex::cli {

enum ExitCode : int { kOk = 0, kUserError = 1, kInternalError = 2 };

// Runs one `mathlex` invocation. args[0] is the program name. `env` supplies
// the MATHLEX_* overrides (flags > environment > config file).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env);

}  // namespace mathlex::cli
