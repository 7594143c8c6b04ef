#include "pla/mlauth/binary_knn.hpp"

#include <catch_amalgamated.hpp>

using namespace pla;

namespace {

LabeledSet five_points()
{
    LabeledSet s{FeatureMatrix(1), {true, true, false, true, false}};
    for (double v : {0.0, 1.0, 2.0, 3.0, 5.0}) s.x.push_back(std::vector<double>{v});
    return s;
}

} // namespace

TEST_CASE("k = 1 returns the label of a coincident point", "[knn]")
{
    const auto s = five_points();
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(binary_knn(s, 1, s.x.vector(i)) == s.positive[i]);
}

TEST_CASE("five-point set with k = 3", "[knn]")
{
    const auto s = five_points();
    // Hand enumeration of the three nearest (distance, index) and their votes.
    CHECK(binary_knn(s, 3, FeatureVector{0.4}));       // 0,1,2 -> A A E
    CHECK_FALSE(binary_knn(s, 3, FeatureVector{4.2})); // 5,3,2 -> E A E
    CHECK(binary_knn(s, 3, FeatureVector{2.5}));       // 2,3 tie at 0.5 then 1 -> E A A
    CHECK_FALSE(binary_knn(s, 3, FeatureVector{3.5})); // 3 (0.5), 2 and 5 tie at 1.5 -> A E E
    CHECK(binary_knn(s, 3, FeatureVector{1.5}));       // 1,2 tie, then 0 and 3 tie at 1.5 -> A E A
}

TEST_CASE("k must be odd and within the training size", "[knn]")
{
    const auto s = five_points();
    CHECK_THROWS_AS(BinaryKnnModel(s, 2), InvariantViolation);
    CHECK_THROWS_AS(BinaryKnnModel(s, 7), InvariantViolation);
    CHECK_NOTHROW(BinaryKnnModel(s, 5));
    CHECK(BinaryKnnModel(s, 5).accepts(std::vector<double>{100.0})); // 3 of 5 positive
}
