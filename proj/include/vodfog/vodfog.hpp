#pragma once

// Everything in one include.

#include "vodfog/config.hpp"
#include "vodfog/demand.hpp"
#include "vodfog/energy.hpp"
#include "vodfog/error.hpp"
#include "vodfog/evaluate.hpp"
#include "vodfog/heuristic.hpp"
#include "vodfog/milp/extract.hpp"
#include "vodfog/milp/linear_model.hpp"
#include "vodfog/milp/model.hpp"
#include "vodfog/milp/mps.hpp"
#include "vodfog/milp/solver.hpp"
#include "vodfog/params.hpp"
#include "vodfog/plan.hpp"
#include "vodfog/power.hpp"
#include "vodfog/scenario.hpp"
#include "vodfog/study.hpp"
#include "vodfog/topology.hpp"
#include "vodfog/util.hpp"
#include "vodfog/verify.hpp"
