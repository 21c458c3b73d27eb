#pragma once

#include "coherence.hpp"
#include "constants.hpp"
#include "density_matrix.hpp"
#include "dipole_probe.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "kinematics.hpp"
#include "pinem.hpp"
#include "specfun.hpp"
#include "wavepackets.hpp"
