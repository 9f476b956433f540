#pragma once

// Umbrella header: the whole library in one include.

#include "motent/baselines.hpp"
#include "motent/core.hpp"
#include "motent/entropy.hpp"
#include "motent/experiment.hpp"
#include "motent/ingest.hpp"
#include "motent/learn.hpp"
#include "motent/rng.hpp"
#include "motent/synth.hpp"
