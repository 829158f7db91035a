#pragma once

#include <cassert>
#include <cmath>
#include <limits>
#include <string>

namespace coevo {

/// Extended real in [0, +inf]. Infinity is carried as an explicit flag so a
/// finite-but-huge double can never be confused with a genuinely infinite
/// constant (s0 or R for some step laws).
class ExtReal {
public:
    ExtReal() : value_(0.0), infinite_(false) {}

    static ExtReal finite(double v) {
        ExtReal r;
        r.value_ = v;
        r.infinite_ = false;
        return r;
    }
    static ExtReal infinity() {
        ExtReal r;
        r.value_ = std::numeric_limits<double>::infinity();
        r.infinite_ = true;
        return r;
    }

    bool is_finite() const { return !infinite_; }
    bool is_infinite() const { return infinite_; }

    /// Finite value; calling this on an infinite ExtReal is a programming error.
    double value() const {
        assert(!infinite_);
        return value_;
    }

    /// Collapse to a double (+inf when infinite), for formulas that tolerate inf.
    double as_double() const {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

    std::string to_string() const {
        return infinite_ ? "inf" : std::to_string(value_);
    }

    friend bool operator<(const ExtReal& a, const ExtReal& b) {
        return a.as_double() < b.as_double();
    }
    friend bool operator<=(const ExtReal& a, const ExtReal& b) {
        return a.as_double() <= b.as_double();
    }

private:
    double value_;
    bool infinite_;
};

}  // namespace coevo
