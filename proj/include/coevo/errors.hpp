#pragma once

#include <stdexcept>
#include <string>

namespace coevo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// step_distribution
struct NegativeWeight : Error { using Error::Error; };
struct MassNotOne : Error { using Error::Error; };
struct EmptySupport : Error { using Error::Error; };
struct ParamOutOfRange : Error { using Error::Error; };

// analytic_constants
struct NoPositiveMassAtZero : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct AssumptionViolated : Error { using Error::Error; };

// random_walk
struct TruncationBudgetExceeded : Error { using Error::Error; };
struct PgfInfinite : Error { using Error::Error; };

// growth_simulator
struct HorizonExplosion : Error { using Error::Error; };

// observables
struct MissingBirthTimes : Error { using Error::Error; };
struct DegenerateSample : Error { using Error::Error; };

// tree files
struct BadMagic : Error { using Error::Error; };
struct TruncatedFile : Error { using Error::Error; };
struct InvariantViolation : Error { using Error::Error; };

}  // namespace coevo
