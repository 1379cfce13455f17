#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "wat/data_io.hpp"
#include "wat/metrics.hpp"

using fixture::sv;
using wat::Label;

TEST_CASE("libsvm line examples") {
    const auto a = wat::parse_libsvm_line("+1 3:4.5 7:1");
    CHECK(a.y == Label::Positive);
    CHECK(a.x == sv({{2, 4.5}, {6, 1.0}}));

    const auto b = wat::parse_libsvm_line("0 1:2");
    CHECK(b.y == Label::Negative);
    CHECK(b.x == sv({{0, 2.0}}));

    CHECK_THROWS_AS(wat::parse_libsvm_line("-1 5:3 2:1"), wat::ParseError);
}

TEST_CASE("libsvm label spellings and zero values") {
    CHECK(wat::parse_libsvm_line("1 1:1").y == Label::Positive);
    CHECK(wat::parse_libsvm_line("-1 1:1").y == Label::Negative);
    CHECK(wat::parse_libsvm_line("+1").x.empty());
    CHECK(wat::parse_libsvm_line("1 2:0 4:1.5").x == sv({{3, 1.5}}));
    CHECK(wat::parse_libsvm_line("1\t2:1   3:2 ").x == sv({{1, 1.0}, {2, 2.0}}));
}

TEST_CASE("libsvm parse errors carry the line number") {
    CHECK_THROWS_AS(wat::parse_libsvm_line("2 1:1"), wat::ParseError);
    CHECK_THROWS_AS(wat::parse_libsvm_line("abc 1:1"), wat::ParseError);
    CHECK_THROWS_AS(wat::parse_libsvm_line("1 0:1"), wat::ParseError);
    CHECK_THROWS_AS(wat::parse_libsvm_line("1 3"), wat::ParseError);
    CHECK_THROWS_AS(wat::parse_libsvm_line("1 3:x"), wat::ParseError);
    CHECK_THROWS_AS(wat::parse_libsvm_line("1 3:1 3:2"), wat::ParseError);

    std::istringstream in("1 1:1\n\n-1 2:1\n1 4:1 3:1\n");
    try {
        wat::read_libsvm(in);
        FAIL("expected a parse error");
    } catch (const wat::ParseError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("streaming reader visits each line once") {
    std::istringstream in("1 1:1\n\n-1 2:1\n1 3:1\n");
    wat::LibsvmReader reader(in);
    int count = 0;
    while (auto ex = reader.next()) ++count;
    CHECK(count == 3);
    CHECK(reader.line_number() == 4);
    CHECK_FALSE(reader.next().has_value());
}

TEST_CASE("round trip through the writer") {
    const auto ds = wat::synth_noisy_stream(fixture::noisy(50, 300, 0.1, 4));
    std::ostringstream out;
    wat::write_libsvm(out, ds.examples);
    std::istringstream in(out.str());
    CHECK(wat::read_libsvm(in) == ds.examples);
}

TEST_CASE("file index reads lines on demand") {
    fixture::TempDir dir("io");
    const auto ds = wat::synth_noisy_stream(fixture::noisy(20, 50, 0.0, 9));
    const auto path = dir.file("d.svm");
    {
        std::ofstream f(path);
        wat::write_libsvm(f, ds.examples);
        f << "\n";
    }
    wat::LibsvmFileIndex index(path);
    REQUIRE(index.size() == 50);
    for (std::size_t i : {49u, 0u, 17u, 17u, 3u}) CHECK(index.read(i) == ds.examples[i]);
    CHECK(wat::read_libsvm_file(path) == ds.examples);
    CHECK_THROWS_AS(wat::read_libsvm_file(dir.file("missing.svm")), std::runtime_error);
}

TEST_CASE("dataset statistics") {
    const std::vector<wat::Example> one = {{sv({{0, 1.0}}), Label::Positive}};
    const auto s = wat::compute_stats(one, 2);
    CHECK(s.sparsity == 0.5);
    CHECK(s.dimension == 2);
    CHECK(s.n_examples == 1);
    CHECK_THROWS_AS(wat::compute_stats(std::vector<wat::Example>{}), std::invalid_argument);
    const std::vector<wat::Example> wide = {{sv({{9, 1.0}}), Label::Positive}};
    CHECK_THROWS_AS(wat::compute_stats(wide, 5), std::invalid_argument);
    CHECK(wat::compute_stats(wide).dimension == 10);
    CHECK(wat::compute_stats(wide).max_index == 9);
}

TEST_CASE("property: statistics match a brute-force recount") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto p = fixture::noisy(40 + seed * 7, 500, 0.05, seed);
        p.density = 0.05 * static_cast<double>(seed);
        const auto ds = wat::synth_noisy_stream(p);
        std::size_t nnz = 0;
        std::size_t max_index = 0;
        for (const auto& ex : ds.examples) {
            for (const auto& f : ex.x.entries()) {
                ++nnz;
                max_index = std::max<std::size_t>(max_index, f.index);
            }
        }
        const auto s = wat::compute_stats(ds.examples, p.dimension);
        CHECK(s.nonzeros == nnz);
        CHECK(s.max_index == max_index);
        CHECK(s.n_examples == ds.examples.size());
        CHECK(s.sparsity == 1.0 - static_cast<double>(nnz) / (500.0 * static_cast<double>(p.dimension)));
    }
}

TEST_CASE("split examples") {
    const auto a = wat::split_indices(10, 0.7, 3);
    CHECK(a.train.size() == 7);
    CHECK(a.test.size() == 3);
    const auto b = wat::split_indices(10, 0.7, 3);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    std::vector<std::size_t> all = a.train;
    all.insert(all.end(), a.test.begin(), a.test.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 10; ++i) CHECK(all[i] == i);
    CHECK_THROWS_AS(wat::split_indices(10, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(wat::split_indices(10, 0.0, 1), std::invalid_argument);
}

TEST_CASE("different seeds give different permutations") {
    int distinct = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto a = wat::split_indices(10, 0.7, 2 * s + 1);
        const auto b = wat::split_indices(10, 0.7, 2 * s + 2);
        distinct += (a.train != b.train || a.test != b.test);
    }
    // 100 draws from 10! permutations each; a collision is a ~1e-5 event.
    CHECK(distinct == 100);
}

TEST_CASE("split_and_shuffle follows the index permutation") {
    const auto ds = wat::synth_noisy_stream(fixture::noisy(10, 40, 0.0, 2));
    const auto idx = wat::split_indices(40, 0.7, 8);
    const auto split = wat::split_and_shuffle(ds.examples, 0.7, 8);
    REQUIRE(split.train.size() == idx.train.size());
    for (std::size_t i = 0; i < idx.train.size(); ++i) CHECK(split.train[i] == ds.examples[idx.train[i]]);
    for (std::size_t i = 0; i < idx.test.size(); ++i) CHECK(split.test[i] == ds.examples[idx.test[i]]);
}

TEST_CASE("synthetic stream without noise is realizable by its hidden vector") {
    const auto ds = wat::synth_noisy_stream(fixture::noisy(100, 2000, 0.0, 11));
    CHECK(wat::accuracy(ds.hidden, ds.examples) == 1.0);
    for (const auto& ex : ds.examples) CHECK(std::abs(wat::dot(ds.hidden, ex.x)) >= 0.1);
}

TEST_CASE("synthetic flip fraction") {
    const auto ds = wat::synth_noisy_stream(fixture::noisy(100, 10000, 0.1, 12));
    std::size_t flipped = 0;
    for (std::size_t i = 0; i < ds.examples.size(); ++i) flipped += ds.examples[i].y != ds.clean_labels[i];
    const double frac = static_cast<double>(flipped) / 10000.0;
    CHECK(std::abs(frac - 0.1) <= 0.01);
}

TEST_CASE("synthetic stream is deterministic per seed") {
    const auto p = fixture::noisy(60, 500, 0.05, 5);
    std::ostringstream a;
    std::ostringstream b;
    wat::write_libsvm(a, wat::synth_noisy_stream(p).examples);
    wat::write_libsvm(b, wat::synth_noisy_stream(p).examples);
    CHECK(a.str() == b.str());
    auto q = p;
    q.seed = 6;
    std::ostringstream c;
    wat::write_libsvm(c, wat::synth_noisy_stream(q).examples);
    CHECK(a.str() != c.str());
}

TEST_CASE("synthetic parameters are validated") {
    auto p = fixture::noisy(100, 10, 0.6, 1);
    CHECK_THROWS_AS(wat::validate(p), std::invalid_argument);
    p.flip_prob = 0.0;
    p.density = 0.0;
    CHECK_THROWS_AS(wat::validate(p), std::invalid_argument);
    p.density = 0.1;
    p.n_examples = 0;
    CHECK_THROWS_AS(wat::validate(p), std::invalid_argument);
}

TEST_CASE("synthetic density") {
    auto p = fixture::noisy(1000, 200, 0.0, 3);
    p.density = 0.01;
    for (const auto& ex : wat::synth_noisy_stream(p).examples) CHECK(ex.x.nnz() == 10);
}
