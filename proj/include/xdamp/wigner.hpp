#pragma once

#include "xdamp/half_int.hpp"

namespace xdamp {

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
///
/// Evaluated with the Racah single-sum formula using a long-double
/// log-factorial table and Neumaier-compensated summation. Returns exactly 0
/// whenever a selection rule fails.
double wigner3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> via the 3j symbol.
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

/// Sum over M_g and q of 3j(J_g 1 J_e; -M_g q M_e) 3j(J_g 1 J_e'; -M_g q M_e').
/// Equals delta(J_e, J_e') delta(M_e, M_e') / (2 J_e + 1).
double orthogonality_sum(HalfInt j_g, HalfInt j_e, HalfInt j_e2, HalfInt m_e, HalfInt m_e2);

}  // namespace xdamp
