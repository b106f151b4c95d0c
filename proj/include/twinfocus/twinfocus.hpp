#ifndef TWINFOCUS_TWINFOCUS_HPP
#define TWINFOCUS_TWINFOCUS_HPP

#include "twinfocus/frames.hpp"
#include "twinfocus/grid.hpp"
#include "twinfocus/io.hpp"
#include "twinfocus/ising.hpp"
#include "twinfocus/measure.hpp"
#include "twinfocus/medium.hpp"
#include "twinfocus/modulation.hpp"
#include "twinfocus/optimize.hpp"
#include "twinfocus/quartic.hpp"
#include "twinfocus/rng.hpp"
#include "twinfocus/state.hpp"
#include "twinfocus/system.hpp"

#endif  // TWINFOCUS_TWINFOCUS_HPP
