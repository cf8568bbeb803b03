#pragma once

#include "mrfsim/apps/applications.hpp"
#include "mrfsim/apps/image_io.hpp"
#include "mrfsim/apps/reference_sampler.hpp"
#include "mrfsim/apps/synthetic.hpp"
#include "mrfsim/banking.hpp"
#include "mrfsim/core.hpp"
#include "mrfsim/perf_model.hpp"
#include "mrfsim/run_config.hpp"
#include "mrfsim/spu.hpp"
#include "mrfsim/tile_sim.hpp"
#include "mrfsim/uq_log.hpp"
