#pragma once

#include "burstgt/errors.hpp"
#include "burstgt/rng.hpp"
#include "burstgt/markov.hpp"
#include "burstgt/test_design.hpp"
#include "burstgt/pooled_channel.hpp"
#include "burstgt/decoder.hpp"
#include "burstgt/statistics.hpp"
#include "burstgt/bounds.hpp"
#include "burstgt/experiment.hpp"
#include "burstgt/config.hpp"
#include "burstgt/results_io.hpp"
#include "burstgt/validation.hpp"
