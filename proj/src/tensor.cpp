#include "gtf/tensor.hpp"

#include "gtf/errors.hpp"

namespace gtf {

TensorValue& TensorValue::operator+=(const TensorValue& o) {
    for (size_t i = 0; i < comps.size(); ++i) comps[i] += o.comps[i];
    return *this;
}

TensorValue& TensorValue::operator*=(double c) {
    for (double& v : comps) v *= c;
    return *this;
}

double TensorValue::contract_dual(const TensorValue& dual) const {
    if (dual.r != s || dual.s != r || dual.n != n)
        throw ContractViolation("contract_dual: rank mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < comps.size(); ++i)
        acc += comps[i] * dual.comps[dual_flat_index(i, r, s, n)];
    return acc;
}

TensorValue TensorValue::tensor_product(const TensorValue& o) const {
    TensorValue out(r + o.r, s + o.s, n);
    // Flat index of the product interleaves blocks:
    // (I_a, I_b, J_a, J_b) for factors a=(this), b=o.
    std::vector<int> idx(out.slots(), 0);
    size_t total = out.size();
    for (size_t flat = 0; flat < total; ++flat) {
        size_t rest = flat;
        for (int k = out.slots() - 1; k >= 0; --k) {
            idx[k] = static_cast<int>(rest % n);
            rest /= n;
        }
        size_t ia = 0, ib = 0;
        int pos = 0;
        for (int k = 0; k < r; ++k) ia = ia * n + idx[pos++];
        for (int k = 0; k < o.r; ++k) ib = ib * n + idx[pos++];
        for (int k = 0; k < s; ++k) ia = ia * n + idx[pos++];
        for (int k = 0; k < o.s; ++k) ib = ib * n + idx[pos++];
        out.comps[flat] = comps[ia] * o.comps[ib];
    }
    return out;
}

size_t dual_flat_index(size_t lambda, int r, int s, int n) {
    // Decompose lambda into r upper digits I then s lower digits J; the dual
    // index is J followed by I.
    std::vector<int> digits(r + s, 0);
    size_t rest = lambda;
    for (int k = r + s - 1; k >= 0; --k) {
        digits[k] = static_cast<int>(rest % n);
        rest /= n;
    }
    size_t out = 0;
    for (int k = r; k < r + s; ++k) out = out * n + digits[k];
    for (int k = 0; k < r; ++k) out = out * n + digits[k];
    return out;
}

TensorValue dual_basis(size_t lambda, int r, int s, int n) {
    TensorValue b(s, r, n);
    b.comps[dual_flat_index(lambda, r, s, n)] = 1.0;
    return b;
}

TensorValue tensor_slot_transform(const TensorValue& t, const Mat& u, const Mat& l) {
    int n = t.n, r = t.r, s = t.s;
    int slots = r + s;
    if (slots == 0) return t;
    TensorValue out(r, s, n);
    std::vector<int> oidx(slots, 0), iidx(slots, 0);
    size_t total = out.size();
    for (size_t flat = 0; flat < total; ++flat) {
        size_t rest = flat;
        for (int k = slots - 1; k >= 0; --k) {
            oidx[k] = static_cast<int>(rest % n);
            rest /= n;
        }
        double acc = 0.0;
        // Sum over the full input index range.
        size_t in_total = t.size();
        for (size_t inflat = 0; inflat < in_total; ++inflat) {
            size_t irest = inflat;
            for (int k = slots - 1; k >= 0; --k) {
                iidx[k] = static_cast<int>(irest % n);
                irest /= n;
            }
            double w = 1.0;
            for (int k = 0; k < r && w != 0.0; ++k) w *= u(oidx[k], iidx[k]);
            for (int k = r; k < slots && w != 0.0; ++k) w *= l(oidx[k], iidx[k]);
            if (w != 0.0) acc += w * t.comps[inflat];
        }
        out.comps[flat] = acc;
    }
    return out;
}

} // namespace gtf
