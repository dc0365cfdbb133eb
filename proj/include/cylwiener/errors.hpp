#pragma once

#include <stdexcept>
#include <string>

namespace cylwiener {

/// Invalid experiment configuration (bad parameters, resource limits,
/// malformed specs). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cylwiener
