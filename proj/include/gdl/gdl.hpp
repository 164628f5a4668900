#pragma once

// Umbrella header: the whole dictionary-learning toolkit.

#include "gdl/baselines.hpp"
#include "gdl/errors.hpp"
#include "gdl/image.hpp"
#include "gdl/io.hpp"
#include "gdl/learner.hpp"
#include "gdl/matrix.hpp"
#include "gdl/metrics.hpp"
#include "gdl/omp.hpp"
#include "gdl/rng.hpp"
#include "gdl/sparse_pca.hpp"
#include "gdl/synthetic.hpp"
