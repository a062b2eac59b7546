#pragma once

#include "rational.hpp"
#include "poly.hpp"
#include "matrix.hpp"
#include "sturm.hpp"
#include "factor.hpp"
#include "recurrence.hpp"
#include "ratfunc.hpp"
#include "numberfield.hpp"
#include "expr.hpp"
#include "catalog.hpp"
#include "affine_maps.hpp"
#include "fixedpoint.hpp"
#include "zeta.hpp"
#include "verify.hpp"
#include "json_io.hpp"
