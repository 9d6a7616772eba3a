#pragma once

#include "simplex_langevin/csv.hpp"
#include "simplex_langevin/diagnostics.hpp"
#include "simplex_langevin/errors.hpp"
#include "simplex_langevin/geometry.hpp"
#include "simplex_langevin/objectives.hpp"
#include "simplex_langevin/optimizers.hpp"
#include "simplex_langevin/portfolio.hpp"
#include "simplex_langevin/rng.hpp"
#include "simplex_langevin/simplex.hpp"
