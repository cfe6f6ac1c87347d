#pragma once

#include "ottess/bisector.hpp"
#include "ottess/geometry.hpp"
#include "ottess/grid.hpp"
#include "ottess/potential.hpp"
#include "ottess/scenario.hpp"
#include "ottess/solver.hpp"
#include "ottess/svg.hpp"
#include "ottess/topology.hpp"
