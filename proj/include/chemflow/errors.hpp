#pragma once
#include <stdexcept>
#include <string>

namespace chemflow {

/// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument / violated precondition.
struct invalid_argument : error {
    explicit invalid_argument(const std::string& what) : error(what) {}
};

/// More than the tolerated fraction of a field's mass sits near the box
/// boundary, so the free-space operators are no longer trustworthy.
struct containment_error : error {
    double t = 0.0;  // simulation time of failure (0 for standalone calls)
    explicit containment_error(const std::string& what, double when = 0.0)
        : error(what), t(when) {}
};

/// Numerical blow-up: the density exceeded the a-priori ceiling by 1e3x
/// or became non-finite.
struct blowup_error : error {
    double t = 0.0;
    explicit blowup_error(const std::string& what, double when = 0.0)
        : error(what), t(when) {}
};

/// Under-resolution: the density developed negative values beyond the
/// monitor tolerance. The run is aborted rather than clipped.
struct resolution_error : error {
    double t = 0.0;
    explicit resolution_error(const std::string& what, double when = 0.0)
        : error(what), t(when) {}
};

/// Configuration text failed to parse or violated an invariant.
struct config_error : error {
    int line = 0;  // 1-based line number, 0 if not tied to a line
    explicit config_error(const std::string& what, int at_line = 0)
        : error(what), line(at_line) {}
};

}  // namespace chemflow
