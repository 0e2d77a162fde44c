#include "regio/format.hpp"
#include "regio/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

using namespace regio;

TEST_CASE("rng streams are reproducible and distinct")
{
    Rng a(42), b(42), c(derive_seed(42, 1));
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
    }
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("rng moments")
{
    Rng rng(7);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0;
    std::set<uint64_t> seen;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
        const auto k = rng.below(6);
        REQUIRE(k < 6);
        seen.insert(k);
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(seen.size() == 6);
}

TEST_CASE("number formatting")
{
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(4.14) == "4.14");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(2.0 / 3.0) == "0.666666666667");
    CHECK(format_number(1e21) == "1e+21");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");

    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double v   = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.below(80)) - 40);
        const auto text  = format_number(v);
        const double back = std::stod(text);
        CHECK(std::abs(back - v) <= 1e-11 * std::abs(v));
        CHECK(format_number(back) == text);
    }
}
