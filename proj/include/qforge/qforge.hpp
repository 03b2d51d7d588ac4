#pragma once

#include "qforge/bfgs.hpp"
#include "qforge/common.hpp"
#include "qforge/continuum.hpp"
#include "qforge/drivers.hpp"
#include "qforge/evolve.hpp"
#include "qforge/experiments.hpp"
#include "qforge/gradient.hpp"
#include "qforge/graph.hpp"
#include "qforge/io.hpp"
#include "qforge/lanczos.hpp"
#include "qforge/parity.hpp"
#include "qforge/schedule.hpp"
#include "qforge/spectral.hpp"
#include "qforge/statevector.hpp"
#include "qforge/version.hpp"
