#pragma once

// Self-adapting anomaly detection for large fleets of service KPIs: behaviour
// features, hierarchical clustering into eight behaviour classes, and
// per-class evolutionary search over detection pipelines.

#include "cratos/cluster_tree.hpp"
#include "cratos/datagen.hpp"
#include "cratos/detectors.hpp"
#include "cratos/evolution.hpp"
#include "cratos/features.hpp"
#include "cratos/genome.hpp"
#include "cratos/io.hpp"
#include "cratos/kmeans.hpp"
#include "cratos/metrics.hpp"
#include "cratos/pipeline.hpp"
#include "cratos/preprocess.hpp"
#include "cratos/rng.hpp"
#include "cratos/stats.hpp"
#include "cratos/time_series.hpp"

namespace cratos {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cratos
