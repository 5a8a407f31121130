#pragma once

#include "cf_operator.hpp"
#include "errors.hpp"
#include "exprparse.hpp"
#include "grid.hpp"
#include "linear_solver.hpp"
#include "msd.hpp"
#include "nonlinear_solver.hpp"
#include "quadrature.hpp"
