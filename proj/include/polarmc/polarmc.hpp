#pragma once

#include "polarmc/arch_model.hpp"
#include "polarmc/errors.hpp"
#include "polarmc/io.hpp"
#include "polarmc/link_sim.hpp"
#include "polarmc/polar_code.hpp"
#include "polarmc/quant.hpp"
#include "polarmc/sc_decoder.hpp"
#include "polarmc/version.hpp"
