#ifndef ELLBILL_ELLBILL_HPP
#define ELLBILL_ELLBILL_HPP

#include "ellbill/average_result.hpp"
#include "ellbill/billiard_dynamics.hpp"
#include "ellbill/conic_geometry.hpp"
#include "ellbill/elliptic_integrals.hpp"
#include "ellbill/errors.hpp"
#include "ellbill/invariant_suite.hpp"
#include "ellbill/spatial_averages.hpp"

#endif
