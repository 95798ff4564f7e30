#pragma once

#include "hsid/types.hpp"

namespace hsid {

/// First `count` Markov parameters [CB, CAB, ..., C A^{count-1} B],
/// computed by iterating x <- A x (never by explicit matrix powers).
MarkovSeq markov_params(const StateSpace& sys, int count);

/// Order-T block Hankel matrix of a 2T-1 block sequence:
/// block(i, j) = g_{i+j-1} (1-indexed anti-diagonals).
HankelMatrix hankel_map(const MarkovSeq& g, int T);

/// Multiplicity of Markov index k (1-indexed) among the anti-diagonals of the
/// order-T Hankel matrix: w(k) = min(k, T, 2T-k).
double hankel_weight(int k, int T);

/// Adjoint of the pseudo-inverse of the Hankel map. Input h is the stacked
/// column form [h_1; ...; h_{2T-1}] with r x p blocks; output is the Tp x Tr
/// matrix with block (i, j) = h_{i+j-1}^T / w(i+j-1), which satisfies
/// <h, g^*> = <adjoint_pinv(h), hankel_map(g)> for every g.
MatrixXd hankel_adjoint_pinv(const MatrixXd& h, int T, int p, int r);

/// Plain adjoint of the Hankel embedding g^* -> H g^*: block k of the result
/// is the sum of M's blocks over the k-th anti-diagonal, returned in stacked
/// column form (L*r) x p. Used by the solver's normal equations and pullbacks.
MatrixXd hankel_pullback(const MatrixXd& M, int T, int p, int r);

/// Stacked observability matrix [C; CA; ...; C A^{T-1}], shape (T*p) x d.
MatrixXd observability(const StateSpace& sys, int T);

/// Controllability matrix [B, AB, ..., A^{T-1} B], shape d x (T*r).
MatrixXd controllability(const StateSpace& sys, int T);

/// Number of singular values of hankel_map(g, T) exceeding rank_tol * s_1.
int mcmillan_degree(const MarkovSeq& g, int T, double rank_tol = 1e-8);

/// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const MatrixXd& A);

/// H-infinity norm of a truncated block sequence: the maximum over the grid
/// frequencies x in {0, 1/grid, ...} of the operator norm of
/// sum_j g_{j+1} e^{i 2 pi j x}.
double hinf_norm(const MarkovSeq& g, int grid = 512);

/// True when spectral_radius(A) < 1.
bool is_stable(const StateSpace& sys);

/// Deterministic SVD sign convention: flips columns of U (and matching
/// columns of V) so the first nonzero coordinate of each left singular
/// vector is positive.
void fix_svd_signs(MatrixXd& U, MatrixXd& V);

}  // namespace hsid
