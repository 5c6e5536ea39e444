#pragma once

#include "crcalc/core.hpp"
#include "crcalc/errors.hpp"
#include "crcalc/fields.hpp"
#include "crcalc/hessian.hpp"
#include "crcalc/lms.hpp"
#include "crcalc/lsq.hpp"
#include "crcalc/optim.hpp"
#include "crcalc/problems.hpp"
#include "crcalc/types.hpp"
#include "crcalc/wirtinger.hpp"
