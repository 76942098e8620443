#pragma once

#include "invivo/capacity.hpp"
#include "invivo/channel_io.hpp"
#include "invivo/channel_model.hpp"
#include "invivo/channel_realization.hpp"
#include "invivo/errors.hpp"
#include "invivo/fer.hpp"
#include "invivo/geometry.hpp"
#include "invivo/link_budget.hpp"
#include "invivo/matrix.hpp"
#include "invivo/phy/convolutional.hpp"
#include "invivo/phy/interleaver.hpp"
#include "invivo/phy/link.hpp"
#include "invivo/phy/mcs.hpp"
#include "invivo/phy/qam.hpp"
#include "invivo/rng.hpp"
#include "invivo/units.hpp"
