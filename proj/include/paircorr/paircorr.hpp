#pragma once

/// @file paircorr.hpp
/// @brief Umbrella header for the library (everything except the CLI,
/// acceptance checks and test oracles).

#include "paircorr/constants.hpp"
#include "paircorr/errors.hpp"
#include "paircorr/explicit_formula.hpp"
#include "paircorr/kernels.hpp"
#include "paircorr/lemma_2_5.hpp"
#include "paircorr/lemmas.hpp"
#include "paircorr/moment_engine.hpp"
#include "paircorr/parallel.hpp"
#include "paircorr/prime_core.hpp"
#include "paircorr/quadrature.hpp"
#include "paircorr/report.hpp"
#include "paircorr/riemann_siegel.hpp"
#include "paircorr/sampled_function.hpp"
#include "paircorr/summation.hpp"
#include "paircorr/zero_engine.hpp"
