#pragma once

#include "ltfei/errors.hpp"
#include "ltfei/exact_sum.hpp"
#include "ltfei/boolean_function.hpp"
#include "ltfei/spectrum.hpp"
#include "ltfei/ltf.hpp"
#include "ltfei/normal.hpp"
#include "ltfei/rng.hpp"
#include "ltfei/distributions.hpp"
#include "ltfei/rademacher.hpp"
#include "ltfei/bounds.hpp"
#include "ltfei/estimators.hpp"
#include "ltfei/records.hpp"
#include "ltfei/toml_lite.hpp"
#include "ltfei/experiment.hpp"
#include "ltfei/verify.hpp"
