// Umbrella header.
#pragma once

#include "heightlab/bigint.hpp"
#include "heightlab/cache.hpp"
#include "heightlab/config.hpp"
#include "heightlab/equilab.hpp"
#include "heightlab/heights.hpp"
#include "heightlab/per1.hpp"
#include "heightlab/polyforms.hpp"
#include "heightlab/potentials.hpp"
#include "heightlab/primes.hpp"
#include "heightlab/qfield.hpp"
#include "heightlab/roots.hpp"
#include "heightlab/upoly.hpp"
