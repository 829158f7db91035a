#pragma once

// Umbrella header for the coevo library: simulation and numerical analysis of
// exploration-driven co-evolving tree networks.

#include "coevo/constants.hpp"
#include "coevo/errors.hpp"
#include "coevo/experiment.hpp"
#include "coevo/extended.hpp"
#include "coevo/growth.hpp"
#include "coevo/observables.hpp"
#include "coevo/random_walk.hpp"
#include "coevo/rng.hpp"
#include "coevo/serialize.hpp"
#include "coevo/stats.hpp"
#include "coevo/step_distribution.hpp"
#include "coevo/tree.hpp"
