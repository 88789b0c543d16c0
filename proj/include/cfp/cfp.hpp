#pragma once

// Umbrella header for the whole library.

#include "cfp/algorithms.hpp"
#include "cfp/convex_set.hpp"
#include "cfp/errors.hpp"
#include "cfp/graph.hpp"
#include "cfp/inequality.hpp"
#include "cfp/metrics.hpp"
#include "cfp/numeric_config.hpp"
#include "cfp/problem.hpp"
#include "cfp/run.hpp"
#include "cfp/scenario.hpp"
#include "cfp/scenario_io.hpp"
#include "cfp/solver_config.hpp"
#include "cfp/step_schedule.hpp"
#include "cfp/switching.hpp"
#include "cfp/trajectory.hpp"
