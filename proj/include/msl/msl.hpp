#pragma once

/// Umbrella header: matrix Sturm-Liouville direct and inverse spectral problems.

#include "msl/core/error.hpp"
#include "msl/core/io.hpp"
#include "msl/core/parallel.hpp"
#include "msl/core/quadrature.hpp"
#include "msl/core/types.hpp"

#include "msl/direct/eigen.hpp"
#include "msl/direct/propagate.hpp"
#include "msl/direct/spectral.hpp"

#include "msl/accelerant/accelerant.hpp"

#include "msl/krein/krein.hpp"

#include "msl/miura/miura.hpp"

#include "msl/validation/conditions.hpp"
#include "msl/validation/report.hpp"

#include "msl/pipeline/config.hpp"
#include "msl/pipeline/pipeline.hpp"
#include "msl/pipeline/synthetic.hpp"
