#pragma once

#include "numerics.hpp"
#include "gevrey_bump.hpp"
#include "dh_construction.hpp"
#include "coefficients.hpp"
#include "test_functions.hpp"
#include "wavelet_expansion.hpp"
#include "gs_metrics.hpp"
#include "mra_projection.hpp"
#include "serialization.hpp"
