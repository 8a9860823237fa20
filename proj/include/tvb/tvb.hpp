#pragma once

#include "tvb/error.hpp"
#include "tvb/exact.hpp"
#include "tvb/lattice.hpp"
#include "tvb/linalg.hpp"
#include "tvb/fan.hpp"
#include "tvb/murphy_fan.hpp"
#include "tvb/divisor.hpp"
#include "tvb/incidence.hpp"
#include "tvb/chern.hpp"
#include "tvb/klyachko.hpp"
#include "tvb/moduli.hpp"
