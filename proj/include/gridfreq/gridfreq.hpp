#pragma once

// Umbrella header: next-hour grid-frequency forecasting with a weighted
// nearest-neighbour pattern predictor, its benchmarks, and the surrounding
// ingestion / statistics / backtesting machinery.

#include "gridfreq/csv.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/eval.hpp"
#include "gridfreq/features.hpp"
#include "gridfreq/ingest.hpp"
#include "gridfreq/pattern.hpp"
#include "gridfreq/predictor.hpp"
#include "gridfreq/series.hpp"
#include "gridfreq/stats.hpp"
#include "gridfreq/synth.hpp"
#include "gridfreq/version.hpp"
