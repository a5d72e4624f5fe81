#pragma once

#include <vector>

#include "gtf/linalg.hpp"

namespace gtf {

// Pointwise (r,s)-tensor: r contravariant slots then s covariant slots,
// components in a flat base-n index (first slot most significant).
struct TensorValue {
    int r = 0, s = 0, n = 1;
    Vec comps;

    TensorValue() : comps(1, 0.0) {}
    TensorValue(int r_, int s_, int n_)
        : r(r_), s(s_), n(n_), comps(flat_size(r_, s_, n_), 0.0) {}

    static size_t flat_size(int r, int s, int n) {
        size_t sz = 1;
        for (int i = 0; i < r + s; ++i) sz *= n;
        return sz;
    }

    static TensorValue scalar(double v) {
        TensorValue t;
        t.comps[0] = v;
        return t;
    }

    int slots() const { return r + s; }
    size_t size() const { return comps.size(); }

    TensorValue& operator+=(const TensorValue& o);
    TensorValue& operator*=(double c);

    // Full pairing with a dual tensor of rank (s, r):
    // t . u = sum_{I,J} t^I_J u^J_I.
    double contract_dual(const TensorValue& dual) const;

    // Tensor product: ranks add.
    TensorValue tensor_product(const TensorValue& o) const;

    double max_abs_value() const { return max_abs(comps); }
};

// For a component index `lambda` of an (r,s)-tensor, the flat index of the
// matching dual component in an (s,r)-tensor (slots swapped blockwise).
size_t dual_flat_index(size_t lambda, int r, int s, int n);

// The constant dual-basis tensor b^lambda of rank (s,r): contracting an
// (r,s)-tensor with it extracts component lambda.
TensorValue dual_basis(size_t lambda, int r, int s, int n);

// Slotwise linear action: every contravariant slot transforms with U
// (out^i = U[i][i'] in^{i'}), every covariant slot with L
// (out_j = L[j][j'] in_{j'}).
TensorValue tensor_slot_transform(const TensorValue& t, const Mat& u, const Mat& l);

} // namespace gtf
