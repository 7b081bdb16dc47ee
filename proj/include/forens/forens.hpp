#pragma once

// Umbrella header.

#include "forens/dct.hpp"
#include "forens/dwt.hpp"
#include "forens/errors.hpp"
#include "forens/experiments.hpp"
#include "forens/extractors.hpp"
#include "forens/feature_stats.hpp"
#include "forens/grid_search.hpp"
#include "forens/image.hpp"
#include "forens/imgio.hpp"
#include "forens/lbp.hpp"
#include "forens/manifest.hpp"
#include "forens/metrics.hpp"
#include "forens/plan.hpp"
#include "forens/report.hpp"
#include "forens/rng.hpp"
#include "forens/svm.hpp"
#include "forens/svm_io.hpp"
#include "forens/synth.hpp"
