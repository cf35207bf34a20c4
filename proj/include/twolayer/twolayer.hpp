#pragma once

// Everything except config_io.hpp, which additionally needs json.hpp.

#include "twolayer/core.hpp"
#include "twolayer/grid.hpp"
#include "twolayer/cyclic_solver.hpp"
#include "twolayer/model_coefficients.hpp"
#include "twolayer/spectral.hpp"
#include "twolayer/parallel.hpp"
#include "twolayer/kdv.hpp"
#include "twolayer/boussinesq.hpp"
#include "twolayer/waves.hpp"
#include "twolayer/regime_analysis.hpp"
#include "twolayer/experiments.hpp"
