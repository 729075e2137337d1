#pragma once

#include "aoe/analysis.hpp"
#include "aoe/effectiveness.hpp"
#include "aoe/error.hpp"
#include "aoe/export.hpp"
#include "aoe/grid.hpp"
#include "aoe/monte_carlo.hpp"
#include "aoe/parallel.hpp"
#include "aoe/propagation.hpp"
#include "aoe/run.hpp"
#include "aoe/scenario.hpp"
