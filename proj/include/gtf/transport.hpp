#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "gtf/geodesics.hpp"
#include "gtf/tensor.hpp"

namespace gtf {

// Parallel transport of zeta from x to y along the connecting geodesic:
// solves rho' = -Gamma(sigma)(sigma', rho) with sigma from log_map.
Vec parallel_transport(const ChartManifold& m, const Vec& x, const Vec& y,
                       const Vec& zeta, const ConvexPatch& patch);

// The matrix a(x, y); columns are transports of the basis vectors
// (integrated as one matrix ODE along the geodesic).
Mat transport_matrix(const ChartManifold& m, const Vec& x, const Vec& y,
                     const ConvexPatch& patch, const Vec* log_hint = nullptr);

// Transport operator a(x,y) with tensor extension, memoized over quadrature
// grids. Evaluation is pure; the cache is a concurrent-read,
// synchronized-write table keyed by quantized coordinates.
class TransportOperator {
public:
    TransportOperator(std::shared_ptr<const ChartManifold> m, ConvexPatch patch,
                      int r = 0, int s = 0)
        : manifold_(std::move(m)), patch_(std::move(patch)), r_(r), s_(s) {}

    const ChartManifold& manifold() const { return *manifold_; }
    const ConvexPatch& patch() const { return patch_; }
    int rank_r() const { return r_; }
    int rank_s() const { return s_; }

    Mat eval(const Vec& x, const Vec& y) const;
    Vec apply(const Vec& x, const Vec& y, const Vec& zeta) const;

    // Contravariant slots get a(x,y), covariant slots (a(x,y)^-1)^T; rank
    // (0,0) is the identity on scalars.
    TensorValue apply_tensor(const Vec& x, const Vec& y, const TensorValue& t) const;

    size_t cache_size() const;

private:
    std::shared_ptr<const ChartManifold> manifold_;
    ConvexPatch patch_;
    int r_, s_;

    struct KeyHash {
        size_t operator()(const std::vector<int64_t>& k) const {
            size_t h = 1469598103934665603ull;
            for (int64_t v : k) {
                h ^= static_cast<size_t>(v);
                h *= 1099511628211ull;
            }
            return h;
        }
    };
    mutable std::unordered_map<std::vector<int64_t>, Mat, KeyHash> cache_;
    mutable Vec warm_x_, warm_y_, warm_w_;
    mutable std::mutex mutex_;
};

TensorValue transport_tensor(const TransportOperator& a, const Vec& x, const Vec& y,
                             const TensorValue& t);

// Finite-difference verification of the diagonal jets of a(x, y):
//   (i)   a(x,x) = id
//   (ii)  a'(x,x)(xi,eta) zeta = -Gamma(x)(eta - xi, zeta)
//   (iii) 2 a''(x,x)(e1,e2) zeta = -(Gamma'(x).(eta1+xi1))(eta2-xi2, zeta)
//         - (Gamma'(x).(eta2+xi2))(eta1-xi1, zeta)
//         + Gamma(x)(eta1-xi1, Gamma(x)(eta2-xi2, zeta))
//         + Gamma(x)(eta2-xi2, Gamma(x)(eta1-xi1, zeta))
struct TransportJetReport {
    double identity_residual = 0.0;
    double first_residual = 0.0;
    double second_residual = 0.0;
    double max_residual = 0.0;
};

TransportJetReport jet_check_transport(const ChartManifold& m, const Vec& x, Rng& rng,
                                       int direction_pairs = 20, double fd_step = 1e-3);

// ((mu,nu)^* A)(p,q) = (D nu(q))^-1 a(mu(p), nu(q)) D mu(p).
Mat pullback_transport(const Diffeo& mu, const Diffeo& nu, const TransportOperator& a,
                       const Vec& p, const Vec& q);

// (L_{X x Y} A)(p,q): Richardson-extrapolated central difference in the flow
// parameter of pullback_transport along (Fl^X_tau, Fl^Y_tau).
Mat lie_transport(const TransportOperator& a, const VectorField& x_field,
                  const VectorField& y_field, const Vec& p, const Vec& q,
                  double tau = 1e-3);

// Same derivative acting on a full (r,s)-tensor value instead of a vector.
TensorValue lie_transport_tensor(const TransportOperator& a, const VectorField& x_field,
                                 const VectorField& y_field, const Vec& p, const Vec& q,
                                 const TensorValue& w, double tau = 1e-3);

// Net rotation angle of transporting around the closed polygon with the
// given vertices (each consecutive pair joined by the unique short geodesic).
double holonomy_angle(const ChartManifold& m, const std::vector<Vec>& vertices);

} // namespace gtf
