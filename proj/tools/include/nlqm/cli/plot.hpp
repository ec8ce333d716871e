#pragma once

#include "nlqm/cli/table.hpp"

#include <iosfwd>

namespace nlqm::cli {

/// Four stacked line plots (|gamma|, tau, N, purity against t) as a standalone SVG.
/// Needs the columns t, Re_gamma, Im_gamma, tau, N and purity.
void write_svg_plots(std::ostream& out, const Table& observables);

}  // namespace nlqm::cli
