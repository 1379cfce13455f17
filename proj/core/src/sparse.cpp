#include "wat/sparse.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace wat {

SparseVector SparseVector::from_entries(std::vector<Feature> entries) {
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].index <= entries[i - 1].index) {
            throw std::invalid_argument("sparse vector indices must be strictly increasing (index " +
                                        std::to_string(entries[i].index) + " follows " +
                                        std::to_string(entries[i - 1].index) + ")");
        }
    }
    std::erase_if(entries, [](const Feature& f) { return f.value == 0.0; });
    return SparseVector(std::move(entries));
}

std::size_t WeightVector::count_nonzero() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(coeffs_.begin(), coeffs_.end(), [](double v) { return v != 0.0; }));
}

void WeightVector::assign(const WeightVector& other) {
    // vector copy-assignment keeps the existing buffer when capacity suffices
    coeffs_ = other.coeffs_;
}

double dot(const WeightVector& w, const SparseVector& x) noexcept {
    const auto coeffs = w.coeffs();
    double sum = 0.0;
    for (const Feature& f : x.entries()) {
        if (f.index < coeffs.size()) sum += coeffs[f.index] * f.value;
    }
    return sum;
}

double sq_norm(const SparseVector& x) noexcept {
    double sum = 0.0;
    for (const Feature& f : x.entries()) sum += f.value * f.value;
    return sum;
}

double hinge_loss(const WeightVector& w, const SparseVector& x, Label y) noexcept {
    return std::max(1.0 - sign(y) * dot(w, x), 0.0);
}

void axpy_sparse(WeightVector& w, double alpha, const SparseVector& x) {
    if (alpha == 0.0 || x.empty()) return;
    w.ensure_dimension(x.extent());
    auto coeffs = w.coeffs();
    for (const Feature& f : x.entries()) coeffs[f.index] += alpha * f.value;
}

}  // namespace wat
