#pragma once

#include <array>
#include <vector>

#include "pvsurf/amplitude.hpp"
#include "pvsurf/params.hpp"
#include "pvsurf/profiles.hpp"

namespace pvsurf {

// Structured evaluation grid for assembled approximate solutions. x' nodes
// are uniform on [0, 2pi)^2. Normal nodes per side split into a near-
// interface layer resolving the fast scale (Y3 up to layer_Y3_max, node
// positions proportional to eps) and an outer part reaching x3_max. Points
// closer than c_band*eps to the interface are excluded from norms.
struct WkbGrid {
  int nx1 = 64, nx2 = 64;
  int n3_per_side = 48;
  double x3_max = 3.0;
  double layer_Y3_max = 10.0;
  double c_band = 2.0;
};

// Sampled approximate solution at one time and one eps, with the metadata
// needed to evaluate it (and its exact space-time derivatives) anywhere.
struct WkbField {
  Background bg;
  FrontSpectrum front;      // leading front spectrum at `time`
  FrontSpectrum front_dot;  // its time derivative (evolution right-hand side)
  double eps = 0.0;
  int order = 1;  // expansion order M
  double time = 0.0;
  WkbGrid grid;
  CutoffSpec cutoff;
  std::vector<double> x3_plasma;       // ascending, all > 0
  std::vector<double> x3_vacuum;       // descending, all < 0
  std::vector<double> front_samples;   // nx1*nx2: interface elevation
  std::vector<double> plasma_samples;  // nx1*nx2*n3*7, component fastest
  std::vector<double> vacuum_samples;  // nx1*nx2*n3*6, component fastest
};

WkbField assemble_wkb(const Background& bg, const FrontSpectrum& front,
                      const FrontSpectrum& front_dot, const WkbGrid& grid,
                      const CutoffSpec& cutoff = {});

// Exact point evaluation of the assembled solution and its first
// derivatives. Any (t, x) is accepted; side selection is the caller's
// responsibility (evaluating one side's expansion across the interface is
// well-defined and used as a sanity probe).
struct Jet7 {
  std::array<double, 7> value{}, dt{}, dx1{}, dx2{}, dx3{};
};
struct Jet6 {
  std::array<double, 6> value{}, dt{}, dx1{}, dx2{}, dx3{};
};
struct FrontJet {
  double value = 0.0, dt = 0.0, dx1 = 0.0, dx2 = 0.0;
};

FrontJet front_jet(const WkbField& f, double t, double x1, double x2);
Jet7 eval_plasma_jet(const WkbField& f, double t, double x1, double x2, double x3);
Jet6 eval_vacuum_jet(const WkbField& f, double t, double x1, double x2, double x3);

// Interior equations applied to a first-order jet. Plasma rows: momentum
// (3), induction (3), div u, div B. Vacuum rows: nu dt H + curl E (3),
// nu dt E - curl H (3), div H, div E.
std::array<double, 8> plasma_equations(const Jet7& j);
std::array<double, 8> vacuum_equations(const Jet6& j, double nu);

struct ResidualNorms {
  double sup = 0.0;
  double l2 = 0.0;  // grid RMS over included points (components summed in quadrature)
};

struct InteriorReport {
  // groups: momentum / induction / div u / div B
  std::array<ResidualNorms, 4> plasma{};
  // groups: nu dt H + curl E / nu dt E - curl H / div H / div E
  std::array<ResidualNorms, 4> vacuum{};
  long included_points = 0;
  long excluded_points = 0;  // within c_band*eps of the interface
};

InteriorReport interior_residual(const WkbField& f);

struct JumpReport {
  // conditions: kinematic / total pressure / B normal / H normal /
  //             tangential electric field (3 components, sup of all)
  std::array<ResidualNorms, 5> conditions{};
  // rounding-level identity linking the 3rd electric-field row to the first
  // two plus the H-normal row
  double third_row_consistency = 0.0;
};

JumpReport jump_residual(const WkbField& f);

struct SweepReport {
  std::vector<double> eps;  // one per requested l, descending in l is fine
  std::vector<InteriorReport> interior;
  std::vector<JumpReport> boundary;
  double interior_slope = 0.0;  // log-log LSQ of max interior group sup vs eps
  double boundary_slope = 0.0;  // same for max jump condition sup
  bool degenerate = false;      // zero front: slopes meaningless
  bool fp_floor_warning = false;
};

// Runs assemble + both residual measurements for each l (eps = 1/(l*|(p,q)|))
// reusing one front/front_dot pair (the front evolution is eps-independent).
SweepReport epsilon_sweep(const Background& bg, const FrontSpectrum& front,
                          const FrontSpectrum& front_dot, const std::vector<int>& l_values,
                          const WkbGrid& grid);

// Multipliers of (dtt, dt d_y1, dt d_y2) in the mean-flux obstruction
// indicator; all three vanish when the vacuum reference fields are zero.
std::array<double, 3> rectification_coefficients(const ReferenceState& state, const Vec2& xi,
                                                 double tau);

struct RectificationReport {
  std::vector<double> times;  // interior snapshot times (central differences)
  int n_grid = 0;             // y' nodes per dimension
  std::vector<std::vector<double>> indicator;  // per interior time, n*n row-major
  double sup = 0.0;
  double derivative_scale = 0.0;  // sup|dtt S| + sup|dt d1 S| + sup|dt d2 S|
  std::array<double, 3> coeffs{};
};

// Applies the obstruction operator to S(t, y') = sum_k |k| |phi~(t, y', k)|^2
// along equally spaced trajectory snapshots: time derivatives by central
// differences, tangential derivatives spectrally. Needs >= 3 snapshots.
RectificationReport rectification_indicator(const std::vector<FrontSpectrum>& snapshots,
                                            const Background& bg);

}  // namespace pvsurf
