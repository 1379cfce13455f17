#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wat/random.hpp"
#include "wat/sparse.hpp"

namespace wat {

struct Example {
    SparseVector x;
    Label y = Label::Positive;

    friend bool operator==(const Example&, const Example&) = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Parses "<label> <idx>:<val> ...". File indices are 1-based and become 0-based;
// labels +1/1 map to Positive and -1/0 to Negative; explicit zero values are
// dropped. Throws ParseError tagged with line_number.
Example parse_libsvm_line(std::string_view line, std::size_t line_number = 1);

// Single-pass reader over a LIBSVM stream. Blank lines are skipped.
class LibsvmReader {
public:
    explicit LibsvmReader(std::istream& in) : in_(&in) {}

    std::optional<Example> next();
    std::size_t line_number() const noexcept { return line_; }

private:
    std::istream* in_;
    std::string buffer_;
    std::size_t line_ = 0;
};

std::vector<Example> read_libsvm(std::istream& in);
// Throws std::runtime_error if the file cannot be opened.
std::vector<Example> read_libsvm_file(const std::filesystem::path& path);

void write_libsvm_line(std::ostream& out, const Example& example);
void write_libsvm(std::ostream& out, std::span<const Example> examples);

// Byte offsets of every non-blank line, for out-of-core shuffles: the permutation
// is applied to offsets and examples are re-read on demand.
class LibsvmFileIndex {
public:
    explicit LibsvmFileIndex(const std::filesystem::path& path);

    std::size_t size() const noexcept { return offsets_.size(); }
    Example read(std::size_t i);

private:
    std::ifstream in_;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::size_t> lines_;
    std::string buffer_;
};

struct DatasetStats {
    std::size_t n_examples = 0;
    std::size_t max_index = 0;  // largest 0-based index seen
    std::size_t dimension = 0;
    std::size_t nonzeros = 0;
    double sparsity = 0.0;  // 1 - nonzeros / (n_examples * dimension)
};

// Largest 0-based index + 1 over all examples.
std::size_t observed_dimension(std::span<const Example> examples) noexcept;

// declared_dimension == 0 means "max index + 1". A declared dimension smaller
// than the observed extent, or an empty dataset, throws std::invalid_argument.
DatasetStats compute_stats(std::span<const Example> examples, std::size_t declared_dimension = 0);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Seeded permutation of [0, n); the first floor(train_fraction * n) entries are
// the training stream in order, the rest the test set.
SplitIndices split_indices(std::size_t n, double train_fraction, std::uint64_t seed);

struct TrainTestSplit {
    std::vector<Example> train;
    std::vector<Example> test;
};

TrainTestSplit split_and_shuffle(std::span<const Example> examples, double train_fraction,
                                 std::uint64_t seed);

struct SynthParams {
    std::size_t dimension = 100;
    std::size_t n_examples = 10000;
    double flip_prob = 0.0;
    double margin = 0.1;
    double density = 0.1;
    std::uint64_t seed = 1;
};

// Throws std::invalid_argument unless 0 <= flip_prob < 0.5, dimension >= 2,
// 0 < density <= 1, margin >= 0 and n_examples >= 1.
void validate(const SynthParams& params);

struct SynthExample {
    Example example;
    Label clean_label;
};

// Draws a hidden unit vector, then sparse examples labelled by its sign with
// |<w*, x>| >= margin, each label flipped independently with flip_prob.
class NoisyStreamGenerator {
public:
    explicit NoisyStreamGenerator(const SynthParams& params);

    SynthExample next();
    const WeightVector& hidden() const noexcept { return hidden_; }

private:
    SynthParams params_;
    std::size_t nnz_per_example_;
    Rng rng_;
    WeightVector hidden_;
    std::vector<FeatureIndex> pool_;
};

struct SynthDataset {
    std::vector<Example> examples;
    std::vector<Label> clean_labels;
    WeightVector hidden;
};

SynthDataset synth_noisy_stream(const SynthParams& params);

}  // namespace wat
