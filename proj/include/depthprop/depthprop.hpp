#pragma once

#include "depthprop/affinity.hpp"
#include "depthprop/bench.hpp"
#include "depthprop/core.hpp"
#include "depthprop/fusion.hpp"
#include "depthprop/geometry.hpp"
#include "depthprop/io.hpp"
#include "depthprop/metrics.hpp"
#include "depthprop/propagation.hpp"
