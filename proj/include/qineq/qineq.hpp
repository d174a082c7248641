#pragma once

#include "qineq/errors.hpp"
#include "qineq/special_functions.hpp"
#include "qineq/quadrature.hpp"
#include "qineq/random.hpp"
#include "qineq/sample.hpp"
#include "qineq/distributions.hpp"
#include "qineq/quantile_estimation.hpp"
#include "qineq/inequality_measures.hpp"
#include "qineq/convexity.hpp"
#include "qineq/montecarlo.hpp"
#include "qineq/datasets.hpp"
#include "qineq/serialization.hpp"
