#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ccr/io.hpp"
#include "test_util.hpp"

using namespace ccr;

TEST_SUITE_BEGIN("io");

TEST_CASE("matrix files round-trip bit-exactly") {
    // 17 significant digits reproduce every double exactly
    SplitMix64 rng(141);
    const auto dir = std::filesystem::temp_directory_path();
    const auto file = dir / "ccr_test_matrix.txt";
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 1 + static_cast<int>(rng.next_below(9));
        const auto a = testutil::random_symmetric(n, rng, 3.0);
        write_matrix(file, a);
        const auto b = read_matrix(file);
        CHECK(b.size() == n);
        CHECK(a.data() == b.data());
    }
    std::filesystem::remove(file);
}

TEST_CASE("matrix reader rejects bad input") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto file = dir / "ccr_test_bad_matrix.txt";

    std::ofstream(file) << "2\n1 2\n3 4\n";
    CHECK_THROWS_AS(read_matrix(file), std::invalid_argument); // asymmetric

    std::ofstream(file) << "3\n1 0\n";
    CHECK_THROWS_AS(read_matrix(file), std::runtime_error); // truncated

    std::ofstream(file) << "0\n";
    CHECK_THROWS_AS(read_matrix(file), std::runtime_error); // bad dimension

    std::filesystem::remove(file);
    CHECK_THROWS_AS(read_matrix(file), std::runtime_error); // missing file
}

TEST_CASE("partition files round-trip") {
    SplitMix64 rng(142);
    const auto dir = std::filesystem::temp_directory_path();
    const auto file = dir / "ccr_test_partition.txt";
    const auto p = make_partition_near_equal(23, 4, 3, rng);
    write_partition(file, p);
    const auto q = read_partition(file);
    CHECK(q.n == p.n);
    CHECK(q.k == p.k);
    CHECK(q.assignment == p.assignment);

    std::ofstream(file) << "3 2\n0 1 5\n"; // label out of range
    CHECK_THROWS_AS(read_partition(file), std::invalid_argument);
    std::filesystem::remove(file);
}

TEST_SUITE_END();
