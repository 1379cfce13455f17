#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "wat/memory.hpp"

namespace wat {

using FeatureIndex = std::uint32_t;

struct Feature {
    FeatureIndex index;
    double value;

    friend bool operator==(const Feature&, const Feature&) = default;
};

// Binary class label. Arithmetic code goes through sign().
enum class Label : int { Negative = -1, Positive = 1 };

constexpr double sign(Label y) noexcept { return y == Label::Positive ? 1.0 : -1.0; }
constexpr Label flip(Label y) noexcept {
    return y == Label::Positive ? Label::Negative : Label::Positive;
}

// Immutable sparse feature vector: indices strictly increasing, no stored zeros.
class SparseVector {
public:
    SparseVector() = default;

    // Validates ordering and drops explicit zeros. Throws std::invalid_argument on
    // a duplicate or decreasing index.
    static SparseVector from_entries(std::vector<Feature> entries);

    std::span<const Feature> entries() const noexcept { return entries_; }
    std::size_t nnz() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    // One past the largest stored index; 0 for the empty vector.
    std::size_t extent() const noexcept {
        return entries_.empty() ? 0 : std::size_t{entries_.back().index} + 1;
    }

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
    explicit SparseVector(std::vector<Feature> entries) : entries_(std::move(entries)) {}

    std::vector<Feature> entries_;
};

// Dense model coefficients. Reads past the allocated extent return 0; writes grow
// the storage with zero fill.
class WeightVector {
public:
    using Storage = std::vector<double, memory::TrackingAllocator<double>>;

    WeightVector() = default;
    explicit WeightVector(std::size_t dimension) : coeffs_(dimension, 0.0) {}

    static WeightVector from_values(std::span<const double> values) {
        WeightVector w;
        w.coeffs_.assign(values.begin(), values.end());
        return w;
    }
    static WeightVector from_values(std::initializer_list<double> values) {
        return from_values(std::span<const double>(values.begin(), values.size()));
    }

    double operator[](std::size_t i) const noexcept {
        return i < coeffs_.size() ? coeffs_[i] : 0.0;
    }

    // Mutable access; grows to i + 1 if needed.
    double& at_grow(std::size_t i) {
        if (i >= coeffs_.size()) coeffs_.resize(i + 1, 0.0);
        return coeffs_[i];
    }

    void ensure_dimension(std::size_t dimension) {
        if (dimension > coeffs_.size()) coeffs_.resize(dimension, 0.0);
    }

    std::size_t dimension() const noexcept { return coeffs_.size(); }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    std::span<double> coeffs() noexcept { return coeffs_; }

    std::size_t count_nonzero() const noexcept;

    // Copies other's coefficients, reusing this vector's allocation when it is
    // large enough.
    void assign(const WeightVector& other);

    friend bool operator==(const WeightVector&, const WeightVector&) = default;

private:
    Storage coeffs_;
};

double dot(const WeightVector& w, const SparseVector& x) noexcept;
double sq_norm(const SparseVector& x) noexcept;

// max(1 - y <w, x>, 0). Zero exactly when the example is passive.
double hinge_loss(const WeightVector& w, const SparseVector& x, Label y) noexcept;

// w += alpha * x, growing w to x's extent.
void axpy_sparse(WeightVector& w, double alpha, const SparseVector& x);

}  // namespace wat
