#include <cmath>

#include "doctest.h"

#include "intimg/error.hpp"
#include "intimg/field.hpp"

using namespace intimg;

TEST_CASE("ScalarField2D geometry") {
    ScalarField2D f(5, 3, 0.5, 2.0);
    CHECK(f.size() == 15);
    CHECK(f.x(0) == -1.0);
    CHECK(f.x(2) == 0.0);
    CHECK(f.x(4) == 1.0);
    CHECK(f.y(0) == -0.5);
    CHECK(f.sum() == 30.0);
    f(4, 2) = 7.0;
    CHECK(f.values()[14] == 7.0);
    CHECK(f.max() == 7.0);
    f.scale(0.5);
    CHECK(f(4, 2) == 3.5);
    CHECK_THROWS_AS(ScalarField2D(0, 3, 1.0), DomainError);
    CHECK_THROWS_AS(ScalarField2D(3, 3, 0.0), DomainError);
}

TEST_CASE("max_relative_difference and normalized_cross_correlation") {
    ScalarField2D a(4, 4, 1.0);
    for (std::size_t k = 0; k < a.size(); ++k) a.values()[k] = static_cast<double>(k);
    ScalarField2D b = a;
    CHECK(max_relative_difference(a, b) == 0.0);
    b(1, 1) += 1.5;
    CHECK(max_relative_difference(a, b) == doctest::Approx(1.5 / 15.0));

    ScalarField2D c = a;
    c.scale(3.0);
    CHECK(normalized_cross_correlation(a, c) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 0; k < c.size(); ++k) c.values()[k] = -a.values()[k];
    CHECK(normalized_cross_correlation(a, c) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(normalized_cross_correlation(a, ScalarField2D(4, 4, 1.0, 1.0)), DegenerateInputError);
    CHECK_THROWS_AS(normalized_cross_correlation(a, ScalarField2D(3, 4, 1.0)), DomainError);
}
