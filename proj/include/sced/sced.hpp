#pragma once

// Umbrella header.

#include "sced/case_io.hpp"
#include "sced/exactness.hpp"
#include "sced/formulation.hpp"
#include "sced/kkt.hpp"
#include "sced/network.hpp"
#include "sced/oracle.hpp"
#include "sced/planner.hpp"
#include "sced/qp.hpp"
#include "sced/report.hpp"
#include "sced/scenario.hpp"
#include "sced/solver.hpp"
