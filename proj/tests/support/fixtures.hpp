#pragma once

#include <string>
#include <vector>

#include "libess/milp.hpp"
#include "libess/params.hpp"

#include "support/toy_oracle.hpp"

namespace esstest {

// Bundled LG M50 parameter set, loaded once and cached.
const ess::CellParams& lgm50();

// Bundled 24-hour price fixture.
const std::vector<double>& day_prices();

std::string data_dir();

// lgm50 with nearly flat open-circuit curves, for tests that want voltage
// decoupled from state of charge.
ess::CellParams flat_ocv_cell();

// Cell whose power-energy fields mirror a toy spec; electrode data is copied
// from the reference set and is irrelevant to the power-energy model.
ess::CellParams cell_for_toy(const ToySpec& spec);

// ArbitrageConfig matching a toy spec at one subinterval per hour.
ess::ArbitrageConfig config_for_toy(const ToySpec& spec);

}  // namespace esstest
