#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gosset::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics to `err`. Returns 0 on success, 2 on invalid input, 3 on
/// numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "inf" (any case, optional sign "+") or a positive decimal.
double parse_nu(const std::string& text);

struct Sweep {
    std::string param;  ///< S0, K, sigma, nu or p
    double lo = 0.0;
    double hi = 0.0;
    int steps = 1;

    std::vector<double> values() const;
};

/// Parses "param:lo:hi:steps".
Sweep parse_sweep(const std::string& text);

}  // namespace gosset::cli
