#pragma once

#include "chordstats/accumulate.hpp"
#include "chordstats/analytic.hpp"
#include "chordstats/billiard.hpp"
#include "chordstats/core.hpp"
#include "chordstats/io.hpp"
#include "chordstats/line_ensemble.hpp"
#include "chordstats/parallel.hpp"
#include "chordstats/quadrature.hpp"
#include "chordstats/random.hpp"
#include "chordstats/stats.hpp"
