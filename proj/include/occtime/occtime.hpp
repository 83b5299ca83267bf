#pragma once

// Umbrella header for the whole library.

#include "occtime/specfun.hpp"
#include "occtime/quadrature.hpp"
#include "occtime/airy_basis.hpp"
#include "occtime/kernel.hpp"
#include "occtime/perturbation.hpp"
#include "occtime/tmax_reference.hpp"
#include "occtime/philox.hpp"
#include "occtime/mc_simulator.hpp"
#include "occtime/validation.hpp"
