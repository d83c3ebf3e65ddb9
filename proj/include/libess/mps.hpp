#pragma once

#include <string>

#include "libess/milp.hpp"

namespace ess {

// Serializes the model in MPS form: NAME, OBJSENSE (maximization only),
// ROWS, COLUMNS with INTORG/INTEND marker pairs around integer variables,
// RHS, BOUNDS, ENDATA.  Names are at most eight characters; numeric fields
// use shortest round-trip formatting, so a reader recovers every coefficient
// bit-exactly.  Layout is column-aligned where values are short enough and
// falls back to single-space separation, which any free-format reader
// accepts.
std::string mps_to_string(const MilpModel& model);

void write_mps(const MilpModel& model, const std::string& path);

// Formats a double so that parsing the text recovers the identical bits.
std::string format_exact(double v);

}  // namespace ess
