#pragma once

// Umbrella header: every library module except the CLI layer.
#include "prodgeo/error.hpp"
#include "prodgeo/matrix.hpp"
#include "prodgeo/jet.hpp"
#include "prodgeo/models.hpp"
#include "prodgeo/derivatives.hpp"
#include "prodgeo/grid.hpp"
#include "prodgeo/econ.hpp"
#include "prodgeo/geom.hpp"
#include "prodgeo/classify.hpp"
#include "prodgeo/io.hpp"
