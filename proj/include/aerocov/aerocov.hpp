#pragma once

#include "aerocov/analytic.hpp"
#include "aerocov/antenna.hpp"
#include "aerocov/channel.hpp"
#include "aerocov/environment.hpp"
#include "aerocov/montecarlo.hpp"
#include "aerocov/quadrature.hpp"
#include "aerocov/rng.hpp"
#include "aerocov/sweep.hpp"
