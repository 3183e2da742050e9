#pragma once

#include <stdexcept>
#include <string>

namespace fe {

// One error type across the workbench; `code` maps onto CLI exit codes
// (Syntax -> 2, Io -> 3, Policy -> 4, everything else -> 1).
class FeError : public std::runtime_error {
public:
    enum class Code { Syntax, Io, Policy, Domain, NoMatch, Unsupported, Internal };

    FeError(Code c, std::string msg, int line = 0, int col = 0)
        : std::runtime_error(line > 0 ? std::to_string(line) + ":" + std::to_string(col) + ": " + msg
                                      : msg),
          code(c), line(line), col(col) {}

    Code code;
    int line;
    int col;
};

}  // namespace fe
