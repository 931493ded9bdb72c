#pragma once

// Umbrella header for the peri2d library.

#include "analysis.hpp"
#include "csv_io.hpp"
#include "fastmath.hpp"
#include "force.hpp"
#include "geom.hpp"
#include "integrator.hpp"
#include "material.hpp"
#include "mesh.hpp"
#include "msh_io.hpp"
#include "neighborhood.hpp"
#include "quadrature.hpp"
#include "scenario.hpp"
#include "simulate.hpp"
#include "studies.hpp"
#include "vtk_io.hpp"
