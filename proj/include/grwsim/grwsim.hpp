#pragma once

// Umbrella header for the GRW collapse / fuzzy-link simulation toolkit.

#include "grwsim/amplitude.hpp"
#include "grwsim/config.hpp"
#include "grwsim/dense_oracle.hpp"
#include "grwsim/errors.hpp"
#include "grwsim/fuzzy.hpp"
#include "grwsim/hit_dynamics.hpp"
#include "grwsim/lattice.hpp"
#include "grwsim/measurement.hpp"
#include "grwsim/product_state.hpp"
#include "grwsim/report_io.hpp"
#include "grwsim/rng.hpp"
#include "grwsim/scenarios.hpp"
#include "grwsim/sparse_state.hpp"
#include "grwsim/version.hpp"
