/**
 * @file exact.hpp
 * @brief Exact one-channel dynamics on concentric-ring crystals.
 *
 * Each ring is restricted to its fully symmetric (Dicke) subspace in the
 * local frame, J^+_m = sum_{j in m} S^+_j e^{-i phi_j}. Basis states are
 * labelled by the number k_m of up spins per ring.
 */
#pragma once

#include "pwave/core.hpp"
#include "pwave/crystal.hpp"
#include "pwave/dynamics.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace pwave {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using ExactState = Eigen::VectorXcd;

struct RingBasis {
  RingCrystalSpec spec;
  std::vector<long long> dims;     ///< N_m + 1
  std::vector<long long> strides;
  long long dimension = 1;

  /// Throws Error{kCapability} when the dimension exceeds max_dimension.
  static RingBasis make(const RingCrystalSpec& spec, long long max_dimension = 86450);
  long long index(const std::vector<int>& k) const;
  std::vector<int> occupations(long long index) const;
};

/// Per-ring collective operators in the flat basis.
SparseMatrix ring_jz(const RingBasis& b, int ring);
SparseMatrix ring_jplus(const RingBasis& b, int ring);
SparseMatrix ring_jminus(const RingBasis& b, int ring);
/// L = sum_m r~_m J^-_m.
SparseMatrix ring_lowering(const RingBasis& b);

/**
 * H = B1 sum_m r~_m^2 J^Z_m - (J/N) sum_{m,m'} r~_m r~_m' J^+_m J^-_m' with
 * B1 = K + J/N. The unrestricted double sum absorbs the j = k terms, so this
 * equals the site-resolved one-channel Hamiltonian minus (J/2N) sum_j r~_j^2.
 */
SparseMatrix build_ring_hamiltonian(const RingBasis& b, const OneChannelParams& p);

/// Product of per-ring spin-coherent states with polar angle theta_m and
/// local-frame azimuth chi_m.
ExactState ring_coherent_state(const RingBasis& b, const std::vector<double>& theta,
                               const std::vector<double>& chi);

/// The BCS texture (flat beam, pulse area pi) mapped ringwise.
ExactState ring_bcs_state(const RingBasis& b);

struct KrylovOptions {
  int max_dimension = 30;
  double tolerance = 1e-10;
  double norm_tolerance = 1e-8;
};

/// Krylov propagation; observables recorded at `times` (increasing, from 0).
TimeSeries evolve_exact(const ExactState& psi0, const RingBasis& b, const OneChannelParams& p,
                        const std::vector<double>& times, const KrylovOptions& opt = {});

/// One Krylov step exp(-i H dt) v with error control by step halving.
ExactState krylov_propagate(const SparseMatrix& h, const ExactState& v, double dt,
                            const KrylovOptions& opt = {});

}  // namespace pwave
