#pragma once

#include <pvsurf/params.hpp>

// Two reference backgrounds shared across the test suite, with their
// independently computed coefficient values frozen to 30 digits.
namespace testutil {

inline pvsurf::ReferenceState worked_state() {
  pvsurf::ReferenceState s;
  s.u0 = {0.3, 0.0, 0.0};
  s.B0 = {1.0, 0.0, 0.0};
  s.H0 = {0.0, 1.0, 0.0};
  s.E3_0 = 0.5;
  s.nu = 0.01;
  return s;
}

// upper admissible frequency of worked_state at xi = (1, 0)
constexpr double worked_tau = 0.569285040951824122212115665822;

inline pvsurf::Background worked_background(int l = 1) {
  return pvsurf::make_background(worked_state(), pvsurf::make_frequency(1, 0, l, worked_tau));
}

inline pvsurf::ReferenceState generic_state() {
  pvsurf::ReferenceState s;
  s.u0 = {0.31, -0.12, 0.0};
  s.B0 = {0.95, 0.24, 0.0};
  s.H0 = {0.62, 0.87, 0.0};
  s.E3_0 = 0.33;
  s.nu = 0.035;
  return s;
}

// upper admissible frequency of generic_state at xi = (2, 1)/sqrt(5)
constexpr double generic_tau = 1.08364486423927374142911090174;

inline pvsurf::Background generic_background(int l = 1) {
  return pvsurf::make_background(generic_state(), pvsurf::make_frequency(2, 1, l, generic_tau));
}

namespace frozen {
// worked_state coefficients at (xi, tau) above
constexpr double w_a_plus = 0.3;
constexpr double w_b_plus = 1.0;
constexpr double w_c_plus = 0.869285040951824122212115665822;
constexpr double w_a_minus_2 = -0.494307149590481758777878843342;
constexpr double w_d0 = -0.00493619631585017686262567599681;
constexpr double w_d1 = 0.124981861510507740691539271447;
constexpr double w_iota2 = -0.494323169885565656606148823558;
constexpr double w_nl = -0.488683075713652369578449868366;
constexpr double w_tt = 0.864348844635973945349489989826;
constexpr double w_ty1 = -0.614232626203945022644826028806;
constexpr double w_Ctt = 0.0;
constexpr double w_Ct1 = 0.0;
constexpr double w_Ct2 = -0.00244323353863374334781272790715;

// generic_state coefficients
constexpr double g_a_plus = 0.223606797749978969640917366873;
constexpr double g_b_plus = 0.957037094369909990063126330217;
constexpr double g_c_plus = 1.30725166198925271107002826861;
constexpr double g_a_minus_1 = 0.171095580068978360152017168704;
constexpr double g_a_minus_2 = -0.262163986913886354499494497315;
constexpr double g_b_minus = 0.943620686504911251884671288205;
constexpr double g_d0 = -0.0048002833008813962141020198697;
constexpr double g_d1 = -0.143744262545394340751644603652;
constexpr double g_d2 = -0.587466206782909103882710843263;
constexpr double g_iota1 = -22.1136563755101016027019423445;
constexpr double g_iota2 = -11.4050408688488651900075302198;
constexpr double g_nl = 1.58540325421993886056026017007;
constexpr double g_tt = 1.30245137868837131485592624874;
constexpr double g_ty1 = -0.647681486980140490879905854088;
constexpr double g_ty2 = -0.974025308870397826826264554748;
constexpr double g_Ctt = -0.000564516199780436465730468714003;
constexpr double g_Ct1 = 0.00128458204390562754499676787718;
constexpr double g_Ct2 = -0.00120128286320747548273288279332;
}  // namespace frozen

}  // namespace testutil
