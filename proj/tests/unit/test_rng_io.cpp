#include <doctest.h>

#include <cstring>
#include <set>

#include "onb/io.hpp"
#include "onb/rng.hpp"
#include "support/test_helpers.hpp"

using namespace onb;

TEST_CASE("rng: identical seeds give identical streams") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng: derived streams are independent of parent consumption") {
    Rng a(7);
    Rng child1 = a.derive(42);
    for (int i = 0; i < 10; ++i) a.next_u64();
    Rng child2 = a.derive(42);
    for (int i = 0; i < 20; ++i) CHECK(child1.next_u64() == child2.next_u64());
    CHECK(a.derive(1).next_u64() != a.derive(2).next_u64());
}

TEST_CASE("rng: uniform range and normal moments") {
    Rng rng(99);
    double sum = 0, sum2 = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    CHECK(std::abs(sum / n) < 0.03);
    CHECK(std::abs(sum2 / n - 1.0) < 0.05);
}

TEST_CASE("rng: sample_without_replacement yields distinct in-range values") {
    Rng rng(5);
    const auto s = rng.sample_without_replacement(50, 20);
    CHECK(s.size() == 20);
    std::set<std::size_t> uniq(s.begin(), s.end());
    CHECK(uniq.size() == 20);
    for (auto v : s) CHECK(v < 50);
}

TEST_CASE("io: little-endian double blobs round trip bit-exactly") {
    std::vector<double> v{0.0, -0.0, 1.5, -3.25e300, 5e-324, 1.0 / 3.0};
    const std::string bytes = doubles_to_le_bytes(v.data(), v.size());
    CHECK(bytes.size() == v.size() * 8);
    const auto back = doubles_from_le_bytes(bytes);
    REQUIRE(back.size() == v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::uint64_t a, b;
        std::memcpy(&a, &v[i], 8);
        std::memcpy(&b, &back[i], 8);
        CHECK(a == b);
    }
    CHECK_THROWS_AS(doubles_from_le_bytes(std::string(11, 'x')), IoError);
}

TEST_CASE("io: sha256 known vectors") {
    CHECK(sha256_hex(std::string("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex(std::string("")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("io: atomic file write and read back") {
    testing::TempDir tmp("io");
    const auto p = tmp.path() / "blob.bin";
    atomic_write_file(p, std::string("a\0b", 3));
    CHECK(read_file_bytes(p) == std::string("a\0b", 3));
    CHECK_THROWS_AS(read_file_bytes(tmp.path() / "missing"), IoError);
}
