#pragma once

#include <array>

#include "ehdg/material.hpp"

namespace ehdg {

// State q = (strain Voigt vector, rho v).
template <int Dim>
inline constexpr int kState = kVoigt<Dim> + Dim;
template <int Dim>
using StateVec = Eigen::Matrix<double, kState<Dim>, 1>;
template <int Dim>
using FluxMat = Eigen::Matrix<double, kState<Dim>, kState<Dim>>;

// B(nu) = -[[0, A(nu)^T / rho], [A(nu) D C D, 0]].
template <int Dim>
FluxMat<Dim> flux_operator(const StiffnessVoigt<Dim>& c, double rho, const Vec<Dim>& nu);

// Velocity and traction carried by a state.
template <int Dim>
Vec<Dim> state_velocity(const StateVec<Dim>& q, double rho);
template <int Dim>
Vec<Dim> state_traction(const StateVec<Dim>& q, const StiffnessVoigt<Dim>& c, const Vec<Dim>& nu);

// left[0] = q-, left[Dim] = q*-, right[0] = q*+, right[Dim] = q+.
// left[a] -> left[a+1] crosses the wave of speed -c_a (c_0 = qP), right[a] -> right[a+1]
// crosses +c_{Dim-1-a}. The same normal nu is used on both sides.
template <int Dim>
struct RHStates {
  std::array<StateVec<Dim>, Dim + 1> left;
  std::array<StateVec<Dim>, Dim + 1> right;
  double max_residual = 0.0;
};

template <int Dim>
RHStates<Dim> solve_rh(const StateVec<Dim>& q_minus, const StateVec<Dim>& q_plus,
                       const Medium<Dim>& minus, const Medium<Dim>& plus, const Vec<Dim>& nu);

// Extracts M with (sigma nu)*- - (sigma nu)- = M (v*- - v-) from RH solves.
template <int Dim>
Mat<Dim> oracle_godunov_matrix(const Medium<Dim>& medium, const Vec<Dim>& nu);

// True when all speeds are pairwise separated by more than 1e-8 c_qP.
template <int Dim>
bool distinct_speeds(const Wavespeeds<Dim>& ws);

}  // namespace ehdg
