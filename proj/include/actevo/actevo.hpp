#pragma once

// Umbrella header.

#include "actevo/activation.hpp"
#include "actevo/baselines.hpp"
#include "actevo/census.hpp"
#include "actevo/coordinator.hpp"
#include "actevo/dataset.hpp"
#include "actevo/evolve.hpp"
#include "actevo/expr.hpp"
#include "actevo/graph.hpp"
#include "actevo/io.hpp"
#include "actevo/mutate.hpp"
#include "actevo/network.hpp"
#include "actevo/ops.hpp"
#include "actevo/piecewise.hpp"
#include "actevo/rng.hpp"
#include "actevo/schedule.hpp"
#include "actevo/train.hpp"
#include "actevo/version.hpp"
#include "actevo/wire.hpp"
#include "actevo/worker.hpp"
