#pragma once

// Static artifact rendering: CSV orbit exports and SVG plots (bifurcation
// diagram, orbit curves).  No interactive UI by design.

#include "choreo/continuation.hpp"
#include "choreo/model.hpp"
#include "choreo/state.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace choreo {

// Time samples of all n bodies over one period; columns t, body, x, y, z.
// Rotating frame: physical time over [0, 2 pi / omega).  Inertial frame:
// q_j(s) = e^{sqrt(s1) s Jbar} u_j(omega s) over the closed inertial period
// (q full turns of the frame, q from classify_frequency, else one turn).
void export_orbit_csv(const std::filesystem::path& path, const StateVector& state,
                      const ModelParams& params, bool inertial, int samples = 1024);

// Fourier coefficients export (same content as orbit_<step>.coeffs).
void export_orbit_coeffs_file(const std::filesystem::path& path, const StateVector& state,
                              const ModelParams& params);

// omega vs amplitude diagram: vertical-family polyline, post-switch polyline,
// junction marker, black dot at the polygon, green dot at the eight, Morse
// indices annotated where present.
void plot_bifurcation_diagram(const std::filesystem::path& path,
                              const std::vector<BranchRecord>& records, int switch_index,
                              std::optional<std::pair<double, double>> eight_point);

// xy-projected closed curves of all bodies (rotating or inertial frame).
void plot_orbit_curves(const std::filesystem::path& path, const StateVector& state,
                       const ModelParams& params, bool inertial, int samples = 720);

}  // namespace choreo
