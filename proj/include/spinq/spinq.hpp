#pragma once

#include "spinq/angle.hpp"
#include "spinq/constants.hpp"
#include "spinq/noise.hpp"
#include "spinq/pulse.hpp"
#include "spinq/qubit.hpp"
#include "spinq/su2.hpp"
#include "spinq/synthesis.hpp"
#include "spinq/report.hpp"
