#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fractal.hpp"
#include "rational.hpp"

namespace fracmetric {

inline std::vector<std::string> builtin_names() { return {"interval", "gasket", "vicsek"}; }

inline bool is_builtin(std::string_view name) {
    return name == "interval" || name == "gasket" || name == "vicsek";
}

/// Built-in specs. Vicsek: cell 5 is the center, P1 is opposite P3 and P2
/// opposite P4; corner cell j meets the center at its own inner corner.
inline FractalSpec builtin(std::string_view name) {
    if (name == "interval")
        return parse_spec("fractal interval\ncells 2\nboundary 2\nglue 1.2 = 2.1\n");
    if (name == "gasket")
        return parse_spec("fractal gasket\ncells 3\nboundary 3\nglue 1.2 = 2.1\nglue 1.3 = 3.1\nglue 2.3 = 3.2\n");
    if (name == "vicsek")
        return parse_spec("fractal vicsek\ncells 5\nboundary 4\n"
                          "glue 1.3 = 5.1\nglue 2.4 = 5.2\nglue 3.1 = 5.3\nglue 4.2 = 5.4\n");
    throw std::invalid_argument("unknown built-in fractal '" + std::string(name) + "'");
}

/// Closed-form metric criteria:
///   interval  a1 + a2 >= 1
///   gasket    ai + aj >= 1 for every pair
///   vicsek    a1 + a3 + a5 >= 1 and a2 + a4 + a5 >= 1
inline bool closed_form_metric(std::string_view name, const PolyRatio& a) {
    auto need = [&](size_t k) {
        if (a.size() != k)
            throw std::invalid_argument("polyratio for " + std::string(name) + " needs " + std::to_string(k) + " entries");
    };
    if (name == "interval") {
        need(2);
        return a[1] + a[2] >= 1;
    }
    if (name == "gasket") {
        need(3);
        return a[1] + a[2] >= 1 && a[1] + a[3] >= 1 && a[2] + a[3] >= 1;
    }
    if (name == "vicsek") {
        need(5);
        return a[1] + a[3] + a[5] >= 1 && a[2] + a[4] + a[5] >= 1;
    }
    throw std::invalid_argument("no closed form for '" + std::string(name) + "'");
}

} // namespace fracmetric
