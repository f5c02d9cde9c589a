#pragma once

#include "cogrelay/random.hpp"
#include "cogrelay/special.hpp"
#include "cogrelay/model.hpp"
#include "cogrelay/decision.hpp"
#include "cogrelay/analytic.hpp"
#include "cogrelay/montecarlo.hpp"
#include "cogrelay/validation.hpp"
#include "cogrelay/experiments.hpp"
