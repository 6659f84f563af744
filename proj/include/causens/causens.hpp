#pragma once

#include "causens/error.hpp"
#include "causens/seeding.hpp"
#include "causens/kernels.hpp"
#include "causens/hsic.hpp"
#include "causens/sensitivity.hpp"
#include "causens/regression.hpp"
#include "causens/dataset.hpp"
#include "causens/causal.hpp"
#include "causens/bench.hpp"
#include "causens/gradcheck.hpp"
