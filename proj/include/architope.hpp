#pragma once

#include "architope/errors.hpp"
#include "architope/experiment.hpp"
#include "architope/function.hpp"
#include "architope/io.hpp"
#include "architope/learners/mlp.hpp"
#include "architope/learners/model.hpp"
#include "architope/learners/polynomial.hpp"
#include "architope/measure.hpp"
#include "architope/metrics.hpp"
#include "architope/partition.hpp"
#include "architope/tope.hpp"
