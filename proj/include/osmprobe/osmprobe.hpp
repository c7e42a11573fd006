#pragma once

#include "errors.hpp"
#include "sparse.hpp"
#include "spectral.hpp"
#include "nelder_mead.hpp"
#include "mesh.hpp"
#include "assembly.hpp"
#include "schur.hpp"
#include "transmission.hpp"
#include "probing.hpp"
#include "osm.hpp"
#include "experiments.hpp"
