#ifndef BSDPI_HPP
#define BSDPI_HPP

#include "bsdpi/error.hpp"
#include "bsdpi/rng.hpp"
#include "bsdpi/matcore.hpp"
#include "bsdpi/quadrature.hpp"
#include "bsdpi/states.hpp"
#include "bsdpi/channels.hpp"
#include "bsdpi/divergences.hpp"
#include "bsdpi/recovery.hpp"
#include "bsdpi/bounds.hpp"
#include "bsdpi/io.hpp"
#include "bsdpi/campaigns.hpp"
#include "bsdpi/harness.hpp"

#endif // BSDPI_HPP
