#pragma once

#include "zcp/betting.hpp"
#include "zcp/bounds.hpp"
#include "zcp/distributions.hpp"
#include "zcp/divergences.hpp"
#include "zcp/error.hpp"
#include "zcp/harness.hpp"
#include "zcp/numeric.hpp"
#include "zcp/quadrature.hpp"
#include "zcp/stats.hpp"
