#pragma once

// Umbrella header for the whole library.

#include "heston/config.hpp"
#include "heston/experiments.hpp"
#include "heston/functionals.hpp"
#include "heston/likelihood.hpp"
#include "heston/linalg.hpp"
#include "heston/mc.hpp"
#include "heston/mle.hpp"
#include "heston/model.hpp"
#include "heston/parallel.hpp"
#include "heston/path_stats.hpp"
#include "heston/regimes.hpp"
#include "heston/rng.hpp"
#include "heston/score_tests.hpp"
#include "heston/sde.hpp"
