#pragma once

#include "conserva/csv.hpp"
#include "conserva/diagnostics.hpp"
#include "conserva/experiments.hpp"
#include "conserva/flux.hpp"
#include "conserva/grid.hpp"
#include "conserva/linear_solvers.hpp"
#include "conserva/newton.hpp"
#include "conserva/pseudo_time.hpp"
#include "conserva/semidisc.hpp"
#include "conserva/tableau.hpp"
#include "conserva/trace.hpp"
