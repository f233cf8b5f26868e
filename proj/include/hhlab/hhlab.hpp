#pragma once

#include "hhlab/errors.hpp"
#include "hhlab/grid.hpp"
#include "hhlab/kernels.hpp"
#include "hhlab/ladder.hpp"
#include "hhlab/liouville.hpp"
#include "hhlab/navier.hpp"
#include "hhlab/ode.hpp"
#include "hhlab/quadrature.hpp"
#include "hhlab/radial.hpp"
#include "hhlab/special.hpp"
