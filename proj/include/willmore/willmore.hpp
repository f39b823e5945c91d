/// \file willmore.hpp
/// \brief Umbrella header.
#pragma once

#include "willmore/checks.hpp"
#include "willmore/config.hpp"
#include "willmore/corpus.hpp"
#include "willmore/error.hpp"
#include "willmore/experiments.hpp"
#include "willmore/functionals.hpp"
#include "willmore/metrics.hpp"
#include "willmore/oracles.hpp"
#include "willmore/quadrature.hpp"
#include "willmore/report.hpp"
#include "willmore/solver.hpp"
#include "willmore/sphere.hpp"
#include "willmore/surface.hpp"
#include "willmore/version.hpp"
