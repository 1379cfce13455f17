#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "wat/data_io.hpp"
#include "wat/sparse.hpp"

namespace fixture {

inline wat::SparseVector sv(std::initializer_list<std::pair<std::uint32_t, double>> entries) {
    std::vector<wat::Feature> f;
    for (auto [i, v] : entries) f.push_back({i, v});
    return wat::SparseVector::from_entries(std::move(f));
}

inline std::vector<double> dense(const wat::WeightVector& w, std::size_t d) {
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i) out[i] = w[i];
    return out;
}

inline std::vector<double> dense(const wat::SparseVector& x, std::size_t d) {
    std::vector<double> out(d, 0.0);
    for (const auto& f : x.entries()) out[f.index] = f.value;
    return out;
}

// Random sparse vector over [0, d) with each coordinate present with prob `density`.
inline wat::SparseVector random_sparse(std::mt19937_64& rng, std::size_t d, double density) {
    std::bernoulli_distribution keep(density);
    std::normal_distribution<double> value(0.0, 1.0);
    std::vector<wat::Feature> f;
    for (std::size_t i = 0; i < d; ++i) {
        if (keep(rng)) f.push_back({static_cast<std::uint32_t>(i), value(rng)});
    }
    return wat::SparseVector::from_entries(std::move(f));
}

inline wat::WeightVector random_dense(std::mt19937_64& rng, std::size_t d, double zero_prob = 0.0) {
    std::bernoulli_distribution zero(zero_prob);
    std::normal_distribution<double> value(0.0, 1.0);
    wat::WeightVector w(d);
    for (std::size_t i = 0; i < d; ++i) w.at_grow(i) = zero(rng) ? 0.0 : value(rng);
    return w;
}

inline wat::Label random_label(std::mt19937_64& rng) {
    return (rng() & 1) ? wat::Label::Positive : wat::Label::Negative;
}

inline wat::SynthParams noisy(std::size_t dim, std::size_t n, double flip, std::uint64_t seed) {
    wat::SynthParams p;
    p.dimension = dim;
    p.n_examples = n;
    p.flip_prob = flip;
    p.seed = seed;
    return p;
}

// Per-test scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("wat-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace fixture
