#pragma once

#include "ihho/bench.hpp"
#include "ihho/cluster.hpp"
#include "ihho/config.hpp"
#include "ihho/core.hpp"
#include "ihho/error.hpp"
#include "ihho/forest.hpp"
#include "ihho/hho.hpp"
#include "ihho/ingest.hpp"
#include "ihho/metrics.hpp"
#include "ihho/neighbors.hpp"
#include "ihho/pipeline.hpp"
#include "ihho/report.hpp"
#include "ihho/resample.hpp"
#include "ihho/rng.hpp"
