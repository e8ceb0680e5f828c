#pragma once

#include "coadapt/analysis.hpp"
#include "coadapt/behavior.hpp"
#include "coadapt/config.hpp"
#include "coadapt/control.hpp"
#include "coadapt/csv.hpp"
#include "coadapt/diagnostics.hpp"
#include "coadapt/engine.hpp"
#include "coadapt/environment.hpp"
#include "coadapt/error.hpp"
#include "coadapt/io.hpp"
#include "coadapt/parallel.hpp"
#include "coadapt/population.hpp"
#include "coadapt/rng.hpp"
#include "coadapt/scenarios.hpp"
#include "coadapt/stats.hpp"
