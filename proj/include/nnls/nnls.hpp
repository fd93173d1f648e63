#pragma once

#include "nnls/errors.hpp"
#include "nnls/grid_spectral.hpp"
#include "nnls/models.hpp"
#include "nnls/analysis.hpp"
#include "nnls/integrator.hpp"
#include "nnls/invariants.hpp"
#include "nnls/simulation.hpp"
