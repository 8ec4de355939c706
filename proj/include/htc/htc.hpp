#pragma once

// Umbrella header: closed-form duty-cycle / cycle-speed analytics for the
// level-triggered harvest-then-consume protocol, plus the Monte Carlo
// simulator that validates them.

#include "htc/analytic.hpp"
#include "htc/config.hpp"
#include "htc/csv.hpp"
#include "htc/distribution.hpp"
#include "htc/errors.hpp"
#include "htc/link.hpp"
#include "htc/normal.hpp"
#include "htc/renewal.hpp"
#include "htc/rng.hpp"
#include "htc/simulator.hpp"
