#pragma once

#include "augury/aggregation.hpp"
#include "augury/csv.hpp"
#include "augury/error.hpp"
#include "augury/forecasting.hpp"
#include "augury/ingestion.hpp"
#include "augury/render.hpp"
#include "augury/seasonal.hpp"
#include "augury/series.hpp"
#include "augury/signal_model.hpp"
#include "augury/stats.hpp"
#include "augury/time.hpp"
#include "augury/workload_sim.hpp"
