#pragma once

#include <string>

#include <json.hpp>

#include "coevo/constants.hpp"
#include "coevo/extended.hpp"

namespace coevo {

using ordered_json = nlohmann::ordered_json;

inline ordered_json ext_to_json(const ExtReal& x) {
    if (x.is_infinite()) return "inf";
    return x.value();
}

inline ordered_json exponent_to_json(const ExponentPrediction& e) {
    ordered_json j;
    j["exact"] = e.exact();
    if (e.exact()) j["value"] = ext_to_json(e.lo);
    j["lo"] = ext_to_json(e.lo);
    j["hi"] = ext_to_json(e.hi);
    return j;
}

inline ordered_json constants_to_json(const ModelConstants& c) {
    ordered_json j;
    j["mean_z"] = c.mean_z;
    j["s0"] = ext_to_json(c.s0);
    j["R"] = ext_to_json(c.R);
    j["q_star"] = c.q_star;
    j["kappa0"] = c.kappa0;
    j["kappa0_minimizer"] = c.kappa0_minimizer;
    j["regime"] = regime_name(c.regime);
    j["degree_exponent"] = exponent_to_json(c.degree_exponent);
    j["assumption_flags"] = c.assumption_flags;
    ordered_json tol;
    tol["root"] = c.tol.root;
    tol["minimize"] = c.tol.minimize;
    tol["rayleigh"] = c.tol.rayleigh;
    j["tolerances"] = tol;
    return j;
}

}  // namespace coevo
