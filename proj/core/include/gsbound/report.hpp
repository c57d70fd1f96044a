#pragma once

#include <iosfwd>
#include <string>

#include "gsbound/bounds.hpp"
#include "gsbound/montecarlo.hpp"

namespace gsbound {

// "key = value" lines, numbers at 17 significant digits. Key order is fixed,
// so identical inputs give byte-identical output.
void write_report(std::ostream& out, const BoundReport& report);
std::string format_report(const BoundReport& report);

// Same format for the simulated moments, keys prefixed with "mc.".
void write_moments(std::ostream& out, const MomentEstimates& mc);

// %.17g, with "inf", "-inf" and "nan" spelled out.
std::string format_number(double x);

}  // namespace gsbound
