#pragma once

// Convenience umbrella: pulls in the simulator, the reconstruction stack, the
// certification bounds, and the pipeline plumbing in dependency order.

#include <smafc/core.hpp>
#include <smafc/rng.hpp>
#include <smafc/optim.hpp>
#include <smafc/generators.hpp>
#include <smafc/process.hpp>
#include <smafc/afc.hpp>
#include <smafc/array.hpp>
#include <smafc/schedule.hpp>
#include <smafc/tomography.hpp>
#include <smafc/certify.hpp>
#include <smafc/io.hpp>
#include <smafc/pipeline.hpp>
