#pragma once

#include <vector>

#include "krf/metric.hpp"
#include "krf/tensor.hpp"

namespace krf {

// Chern connection Gamma^k_{ij} = g^{lbar k} dz_i g_{j lbar}.
Connection christoffel(const MetricField& g);

// Covariant derivative of an all-lower tensor.  The new slot is appended
// last.  A holomorphic direction corrects holomorphic slots with -C, an
// anti-holomorphic one corrects anti-holomorphic slots with -conj(C);
// conn == nullptr gives the plain partial derivative.
TensorField covderiv(const TensorField& t, Slot direction, const Connection* conn);

// Subtracts the connection terms of `conn` acting on `t` from `out`, where
// `out` has t's signature plus `direction`.
void subtract_connection_terms(TensorField& out, const TensorField& t, Slot direction,
                               const Connection& conn);

// The reference metric g0 with its connection and curvature, computed once.
struct Reference {
  MetricField metric;
  Connection gamma;
  TensorField curvature;  // R0_{i jbar k lbar}
};

Reference make_reference(MetricField g0);

TensorField covderiv_ref(const TensorField& t, Slot direction, const Reference& ref);

// R_{i jbar k lbar} = -d_k d_lbar g_{i jbar} + g^{nubar mu} d_k g_{i nubar} d_lbar g_{mu jbar}
// with plain partial derivatives in the global flat coordinates.
TensorField curvature_direct(const MetricField& g);

// R_{i jbar k lbar} = -g_{i jbar;k lbar} + g^{qbar p} g_{i qbar;k} g_{p jbar;lbar}
//                     + R0_{i qbar k lbar} g0^{qbar p} g_{p jbar}
// with ';' the Chern covariant derivative of the reference metric.
TensorField curvature_via_ref(const MetricField& g, const Reference& ref);

// Max deviation from R_{ijkl} = R_{kjil} = R_{ilkj} and R_{ijkl} = conj(R_{jilk}).
double kahler_symmetry_residual(const TensorField& rm);

// R_{i jbar} = -dz_i dzbar_j log det g.
TensorField ricci(const MetricField& g);
// g^{lbar k} R_{i jbar k lbar}.
TensorField ricci_trace(const TensorField& rm, const MetricField& g);

// Max residual over points and (i, jbar) of
//   g^{lbar k} g_{i jbar;k lbar} = -R_{i jbar} + g^{lbar k} g^{qbar p} g_{i qbar;k} g_{p jbar;lbar}
//                                  + R0_{i qbar k lbar} g0^{qbar p} g_{p jbar} g^{lbar k}.
double trace_identity_residual(const MetricField& g, const Reference& ref);

// Chern Laplacian g^{jbar i} dz_i dzbar_j h.
ScalarField laplacian(const MetricField& g, const ScalarField& h);

// |T|^2 with `weight` used to contract every slot against the conjugate.
ScalarField tensor_norm(const TensorField& t, const MetricField& weight);

// D^a_{l i} = g^{bbar a} g_{i bbar;l}: the difference between the Chern
// connections of g and of the reference.
Connection difference_tensor(const MetricField& g, const Reference& ref);

// Covariant derivative with respect to g assembled from the reference
// derivative and difference-tensor corrections.
TensorField covderiv_evolving(const TensorField& t, Slot direction, const Reference& ref,
                              const Connection& difference);

// nabla^k Rm (k <= 2) for the evolving metric, one tensor per direction
// pattern (holo before anti at each level).  Assembled from reference
// covariant derivatives plus correction terms.
std::vector<TensorField> nabla_rm(const MetricField& g, const Reference& ref, int k);
// Same tensors from the explicitly built connection of g.
std::vector<TensorField> nabla_rm_direct(const MetricField& g, int k);
// |nabla^k Rm|^2_g summed over direction patterns, computed depth-first.
ScalarField nabla_rm_norm(const MetricField& g, const Reference& ref, int k);

// Direction patterns of length m in the order used above.
std::vector<std::vector<Slot>> direction_patterns(int m);

}  // namespace krf
