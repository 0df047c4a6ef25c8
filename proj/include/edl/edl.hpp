#pragma once

#include "edl/eigen_disk.hpp"
#include "edl/error.hpp"
#include "edl/family_map.hpp"
#include "edl/fields.hpp"
#include "edl/io.hpp"
#include "edl/nonlinearity.hpp"
#include "edl/qform.hpp"
#include "edl/radial_ode.hpp"
#include "edl/run_config.hpp"
#include "edl/sphere.hpp"
#include "edl/verify.hpp"
