#pragma once

#include "gkdv/continuation.hpp"
#include "gkdv/energy.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/fft.hpp"
#include "gkdv/functionals.hpp"
#include "gkdv/gevrey.hpp"
#include "gkdv/grid.hpp"
#include "gkdv/harness/config.hpp"
#include "gkdv/harness/run.hpp"
#include "gkdv/harness/table.hpp"
#include "gkdv/initial_data.hpp"
#include "gkdv/probes.hpp"
#include "gkdv/solver.hpp"
#include "gkdv/spacetime.hpp"
#include "gkdv/spectral.hpp"
