#pragma once

// Umbrella header for the AsK-LS library.

#include "askls/common.hpp"
#include "askls/gram.hpp"
#include "askls/kernels.hpp"
#include "askls/solver.hpp"
#include "askls/model.hpp"
#include "askls/metrics.hpp"
#include "askls/multiclass.hpp"
#include "askls/data.hpp"
