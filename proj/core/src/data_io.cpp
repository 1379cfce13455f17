#include "wat/data_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace wat {
namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view token, double& out) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return false;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size() && std::isfinite(out);
}

Label parse_label(std::string_view token, std::size_t line) {
    double value = 0.0;
    if (!parse_double(token, value)) {
        throw ParseError(line, "unparseable label '" + std::string(token) + "'");
    }
    if (value == 1.0) return Label::Positive;
    if (value == -1.0 || value == 0.0) return Label::Negative;
    throw ParseError(line, "label must be one of +1, 1, -1, 0 (got '" + std::string(token) + "')");
}

}  // namespace

Example parse_libsvm_line(std::string_view line, std::size_t line_number) {
    line = trim(line);
    if (line.empty()) throw ParseError(line_number, "empty line");

    std::vector<Feature> features;
    std::size_t pos = 0;
    bool first = true;
    Label label = Label::Positive;
    std::uint64_t previous = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        if (pos >= line.size()) break;
        std::size_t end = pos;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
        const std::string_view token = line.substr(pos, end - pos);
        pos = end;

        if (first) {
            label = parse_label(token, line_number);
            first = false;
            continue;
        }
        const auto colon = token.find(':');
        if (colon == std::string_view::npos) {
            throw ParseError(line_number, "malformed feature token '" + std::string(token) + "'");
        }
        const std::string_view idx_text = token.substr(0, colon);
        std::uint64_t index = 0;
        const auto [ptr, ec] =
            std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
        if (ec != std::errc{} || ptr != idx_text.data() + idx_text.size() || idx_text.empty()) {
            throw ParseError(line_number, "malformed feature index in '" + std::string(token) + "'");
        }
        if (index == 0) {
            throw ParseError(line_number, "feature indices are 1-based; got 0");
        }
        if (index > std::uint64_t{std::numeric_limits<FeatureIndex>::max()}) {
            throw ParseError(line_number, "feature index " + std::to_string(index) + " too large");
        }
        if (index <= previous) {
            throw ParseError(line_number, "non-increasing feature index " + std::to_string(index) +
                                              " after " + std::to_string(previous));
        }
        previous = index;
        double value = 0.0;
        if (!parse_double(token.substr(colon + 1), value)) {
            throw ParseError(line_number, "malformed feature value in '" + std::string(token) + "'");
        }
        if (value != 0.0) features.push_back({static_cast<FeatureIndex>(index - 1), value});
    }
    return Example{SparseVector::from_entries(std::move(features)), label};
}

std::optional<Example> LibsvmReader::next() {
    while (std::getline(*in_, buffer_)) {
        ++line_;
        if (trim(buffer_).empty()) continue;
        return parse_libsvm_line(buffer_, line_);
    }
    return std::nullopt;
}

std::vector<Example> read_libsvm(std::istream& in) {
    std::vector<Example> out;
    LibsvmReader reader(in);
    while (auto ex = reader.next()) out.push_back(std::move(*ex));
    return out;
}

std::vector<Example> read_libsvm_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset '" + path.string() + "'");
    return read_libsvm(in);
}

void write_libsvm_line(std::ostream& out, const Example& example) {
    std::array<char, 64> buf{};
    out << (example.y == Label::Positive ? "+1" : "-1");
    for (const Feature& f : example.x.entries()) {
        const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), f.value);
        out << ' ' << (std::uint64_t{f.index} + 1) << ':'
            << std::string_view(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
    }
    out << '\n';
}

void write_libsvm(std::ostream& out, std::span<const Example> examples) {
    for (const Example& ex : examples) write_libsvm_line(out, ex);
}

LibsvmFileIndex::LibsvmFileIndex(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open dataset '" + path.string() + "'");
    std::uint64_t offset = 0;
    std::size_t line = 0;
    while (std::getline(in_, buffer_)) {
        ++line;
        if (!trim(buffer_).empty()) {
            offsets_.push_back(offset);
            lines_.push_back(line);
        }
        offset += buffer_.size() + 1;
    }
    in_.clear();
}

Example LibsvmFileIndex::read(std::size_t i) {
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(offsets_.at(i)));
    std::getline(in_, buffer_);
    return parse_libsvm_line(buffer_, lines_[i]);
}

std::size_t observed_dimension(std::span<const Example> examples) noexcept {
    std::size_t extent = 0;
    for (const Example& ex : examples) extent = std::max(extent, ex.x.extent());
    return extent;
}

DatasetStats compute_stats(std::span<const Example> examples, std::size_t declared_dimension) {
    if (examples.empty()) throw std::invalid_argument("cannot compute statistics of an empty dataset");
    DatasetStats stats;
    stats.n_examples = examples.size();
    const std::size_t extent = observed_dimension(examples);
    stats.max_index = extent == 0 ? 0 : extent - 1;
    if (declared_dimension != 0 && declared_dimension < extent) {
        throw std::invalid_argument("declared dimension " + std::to_string(declared_dimension) +
                                    " is smaller than observed extent " + std::to_string(extent));
    }
    stats.dimension = declared_dimension != 0 ? declared_dimension : extent;
    for (const Example& ex : examples) stats.nonzeros += ex.x.nnz();
    if (stats.dimension == 0) {
        stats.sparsity = 1.0;
    } else {
        stats.sparsity = 1.0 - static_cast<double>(stats.nonzeros) /
                                   (static_cast<double>(stats.n_examples) *
                                    static_cast<double>(stats.dimension));
    }
    return stats;
}

SplitIndices split_indices(std::size_t n, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("train fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(derive_seed(seed, 0x5e11));
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(perm[i - 1], perm[j]);
    }
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    SplitIndices out;
    out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    return out;
}

TrainTestSplit split_and_shuffle(std::span<const Example> examples, double train_fraction,
                                 std::uint64_t seed) {
    const SplitIndices idx = split_indices(examples.size(), train_fraction, seed);
    TrainTestSplit out;
    out.train.reserve(idx.train.size());
    out.test.reserve(idx.test.size());
    for (std::size_t i : idx.train) out.train.push_back(examples[i]);
    for (std::size_t i : idx.test) out.test.push_back(examples[i]);
    return out;
}

void validate(const SynthParams& p) {
    if (!(p.flip_prob >= 0.0 && p.flip_prob < 0.5)) {
        throw std::invalid_argument("flip probability must lie in [0, 0.5)");
    }
    if (p.dimension < 2) throw std::invalid_argument("dimension must be at least 2");
    if (!(p.density > 0.0 && p.density <= 1.0)) {
        throw std::invalid_argument("density must lie in (0, 1]");
    }
    if (!(p.margin >= 0.0) || !std::isfinite(p.margin)) {
        throw std::invalid_argument("margin must be non-negative");
    }
    if (p.n_examples == 0) throw std::invalid_argument("example count must be positive");
    if (p.dimension > std::size_t{std::numeric_limits<FeatureIndex>::max()}) {
        throw std::invalid_argument("dimension too large");
    }
}

NoisyStreamGenerator::NoisyStreamGenerator(const SynthParams& params)
    : params_(params), nnz_per_example_(0), rng_(derive_seed(params.seed, 0x5717)) {
    validate(params_);
    nnz_per_example_ = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(params_.density * static_cast<double>(params_.dimension))),
        1, params_.dimension);

    hidden_ = WeightVector(params_.dimension);
    auto h = hidden_.coeffs();
    double norm2 = 0.0;
    for (double& v : h) {
        v = standard_normal(rng_);
        norm2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : h) v *= inv;

    pool_.resize(params_.dimension);
    for (std::size_t i = 0; i < pool_.size(); ++i) pool_[i] = static_cast<FeatureIndex>(i);
}

SynthExample NoisyStreamGenerator::next() {
    const std::size_t d = params_.dimension;
    std::vector<Feature> features(nnz_per_example_);
    for (std::size_t attempt = 0;; ++attempt) {
        if (attempt == 1'000'000) {
            throw std::runtime_error("synthetic generator cannot reach the requested margin");
        }
        // partial Fisher-Yates; the pool stays a permutation between draws
        for (std::size_t k = 0; k < nnz_per_example_; ++k) {
            const std::size_t j = k + static_cast<std::size_t>(uniform_index(rng_, d - k));
            std::swap(pool_[k], pool_[j]);
        }
        for (std::size_t k = 0; k < nnz_per_example_; ++k) features[k].index = pool_[k];
        std::sort(features.begin(), features.end(),
                  [](const Feature& a, const Feature& b) { return a.index < b.index; });
        double margin = 0.0;
        for (Feature& f : features) {
            f.value = standard_normal(rng_);
            margin += hidden_[f.index] * f.value;
        }
        if (margin == 0.0 || std::abs(margin) < params_.margin) continue;

        const Label clean = margin > 0.0 ? Label::Positive : Label::Negative;
        const bool flipped = open_unit(rng_) < params_.flip_prob;
        return SynthExample{Example{SparseVector::from_entries(features), flipped ? flip(clean) : clean},
                            clean};
    }
}

SynthDataset synth_noisy_stream(const SynthParams& params) {
    NoisyStreamGenerator gen(params);
    SynthDataset out;
    out.examples.reserve(params.n_examples);
    out.clean_labels.reserve(params.n_examples);
    for (std::size_t i = 0; i < params.n_examples; ++i) {
        SynthExample s = gen.next();
        out.examples.push_back(std::move(s.example));
        out.clean_labels.push_back(s.clean_label);
    }
    out.hidden = gen.hidden();
    return out;
}

}  // namespace wat
