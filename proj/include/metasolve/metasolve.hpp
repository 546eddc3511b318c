#pragma once

// Umbrella header: the whole library in dependency order.

#include "errors.hpp"
#include "ledger.hpp"
#include "vector_ops.hpp"
#include "sparse.hpp"
#include "dense.hpp"
#include "poisson.hpp"
#include "smoothers.hpp"
#include "coarse_space.hpp"
#include "krylov.hpp"
#include "presets.hpp"
#include "enumerate.hpp"
#include "meta_solver.hpp"
#include "metrics.hpp"
#include "pareto.hpp"
#include "lp.hpp"
#include "rediscovery.hpp"
#include "results_io.hpp"
#include "run_config.hpp"
#include "sweep_runner.hpp"
#include "reporting.hpp"
