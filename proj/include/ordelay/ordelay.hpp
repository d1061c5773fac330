#pragma once

#include "ordelay/errors.hpp"
#include "ordelay/finite_memory.hpp"
#include "ordelay/metrics.hpp"
#include "ordelay/normal.hpp"
#include "ordelay/policy.hpp"
#include "ordelay/polynomial.hpp"
#include "ordelay/quadrature.hpp"
#include "ordelay/simulate.hpp"
#include "ordelay/transfer.hpp"
