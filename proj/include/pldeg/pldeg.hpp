#pragma once

#include "pldeg/error.hpp"
#include "pldeg/geometry.hpp"
#include "pldeg/mesh.hpp"
#include "pldeg/meshgen.hpp"
#include "pldeg/degree.hpp"
#include "pldeg/topology.hpp"
#include "pldeg/conditions.hpp"
#include "pldeg/elasticity.hpp"
#include "pldeg/fixtures.hpp"
#include "pldeg/random_maps.hpp"
#include "pldeg/io.hpp"
#include "pldeg/selftest.hpp"
