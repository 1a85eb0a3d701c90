#pragma once

#include <stdexcept>
#include <string>

namespace rides {

// Exit-code contract: 1 = configuration, 2 = data, 3 = numerical.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    double residual = 0.0;
    explicit NumericalError(const std::string& msg, double res = 0.0)
        : std::runtime_error(msg), residual(res) {}
};

}  // namespace rides
