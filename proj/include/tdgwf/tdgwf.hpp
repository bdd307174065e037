#pragma once

#include "tdgwf/acoustics.hpp"
#include "tdgwf/bench.hpp"
#include "tdgwf/error.hpp"
#include "tdgwf/fd_beam.hpp"
#include "tdgwf/gwf.hpp"
#include "tdgwf/metrics.hpp"
#include "tdgwf/pipeline.hpp"
#include "tdgwf/signal.hpp"
#include "tdgwf/sources.hpp"
#include "tdgwf/transforms.hpp"
#include "tdgwf/wav.hpp"
