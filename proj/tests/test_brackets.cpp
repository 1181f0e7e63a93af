#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "conegap/brackets.hpp"

#include <cmath>
#include <numbers>

using namespace conegap;

namespace {

Vec pt(std::initializer_list<double> xs) {
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

// Finite-difference bracket oracle: [h1,h2] = Dh2.h1 - Dh1.h2 with
// jacobians by central differences, independent of the symbolic path.
Vec fd_bracket(const VectorFieldExpr& h1, const VectorFieldExpr& h2, const Vec& x) {
    const int n = h1.dim();
    const double h = 1e-6;
    auto fd_jac = [&](const VectorFieldExpr& F) {
        Mat J(n, n);
        for (int j = 0; j < n; ++j) {
            Vec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            J.col(j) = (F.eval(xp) - F.eval(xm)) / (2 * h);
        }
        return J;
    };
    return fd_jac(h2) * h1.eval(x) - fd_jac(h1) * h2.eval(x);
}

}  // namespace

TEST_CASE("parse and pretty-print") {
    FormalBracket b = FormalBracket::parse("[[X1,X2],X3]");
    CHECK(b.length() == 3);
    CHECK(b.to_string() == "[[X1,X2],X3]");
    CHECK_FALSE(b.is_leaf());
    CHECK(b.right().letter() == 3);

    FormalBracket l = FormalBracket::parse("X5");
    CHECK(l.is_leaf());
    CHECK(l.length() == 1);
    CHECK(l.letter() == 5);

    CHECK_THROWS_AS(FormalBracket::parse("[[X1,X2]"), ParseError);
    CHECK_THROWS_AS(FormalBracket::parse("[X1 X2]"), ParseError);
    CHECK_THROWS_AS(FormalBracket::parse("X0"), ParseError);
    CHECK_THROWS_AS(FormalBracket::parse("[[X1,X2],X3]]"), ParseError);

    FormalBracket round = FormalBracket::parse(b.to_string());
    CHECK(round.to_string() == b.to_string());
}

TEST_CASE("lengths of the four example brackets") {
    CHECK(FormalBracket::parse("[[X1,X2],X3]").length() == 3);
    CHECK(FormalBracket::parse("[[X1,X2],[X3,X4]]").length() == 4);
    CHECK(FormalBracket::parse("[[[X1,X2],X3],X4]").length() == 4);
    CHECK(FormalBracket::parse("[[X2,X3],X4]").length() == 3);
}

TEST_CASE("switch numbers") {
    CHECK(switch_number(FormalBracket::parse("[[X3,X4],[[X5,X6],X7]]")) == 28);
    CHECK(switch_number(FormalBracket::parse("[[X5,X6],X7]")) == 10);
    CHECK(switch_number(FormalBracket::parse("X1")) == 1);
}

TEST_CASE("switch-number parity: nodes are even and at least 4") {
    Sampler rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        // random bracket of length 2..6
        std::function<FormalBracket(int, int)> rand_bracket = [&](int len,
                                                                  int base) -> FormalBracket {
            if (len == 1) return FormalBracket::leaf(base);
            int l = rng.uniform_int(1, len - 1);
            return FormalBracket::node(rand_bracket(l, base),
                                       rand_bracket(len - l, base + l));
        };
        FormalBracket B = rand_bracket(rng.uniform_int(2, 6), 1);
        long r = switch_number(B);
        CHECK(r % 2 == 0);
        CHECK(r >= 4);
    }
}

TEST_CASE("required smoothness matches the worked examples") {
    // [[[X3,X4],[X5,X6]],X7]: X3..X6 need 3+k, X7 needs 1+k
    FormalBracket B = FormalBracket::parse("[[[X3,X4],[X5,X6]],X7]");
    for (int k : {0, 1, 2}) {
        auto req = required_smoothness(B, k);
        for (int letter : {3, 4, 5, 6}) CHECK(req.per_letter.at(letter) == 3 + k);
        CHECK(req.per_letter.at(7) == 1 + k);
        CHECK(req.rule_unverified_beyond_length_4);  // length 5
    }
}

TEST_CASE("required smoothness with shared fields") {
    // [[X3,[X4,X5]],X6] with X3, X6 assigned the same field: that field needs
    // max(2,1)+k = 2+k while the inner letters need 3+k.
    FormalBracket B = FormalBracket::parse("[[X3,[X4,X5]],X6]");
    auto req = required_smoothness(B, 0);
    CHECK(req.per_letter.at(3) == 2);
    CHECK(req.per_letter.at(4) == 3);
    CHECK(req.per_letter.at(5) == 3);
    CHECK(req.per_letter.at(6) == 1);
    CHECK_FALSE(req.rule_unverified_beyond_length_4);

    auto req5 = required_smoothness(FormalBracket::parse("[[[X1,X2],[X3,X4]],X5]"), 0);
    CHECK(req5.rule_unverified_beyond_length_4);
}

TEST_CASE("leaf needs exactly C^k") {
    auto req = required_smoothness(FormalBracket::parse("X1"), 3);
    CHECK(req.per_letter.at(1) == 3);
}

TEST_CASE("bracket of a field with itself vanishes") {
    auto h = VectorFieldExpr::parse({"x1*x2", "sin(x1)"});
    BracketAssignment A{FormalBracket::parse("[X1,X1]"), {h}};
    Vec v = eval_bracket(A, pt({0.7, -0.3}));
    CHECK(v.norm() == 0.0);
}

TEST_CASE("the section 4.4 bracket [f, g1]") {
    auto f = VectorFieldExpr::parse({"0", "1"});
    auto g1 = VectorFieldExpr::parse({"1", "0.5*sin(pi*(x2-0.5))-0.5"});
    BracketAssignment A{FormalBracket::parse("[X1,X2]"), {f, g1}};

    Vec at_half = eval_bracket(A, pt({0.0, 0.5}));
    CHECK(at_half[0] == doctest::Approx(0.0));
    CHECK(at_half[1] == doctest::Approx(std::numbers::pi / 2));

    Vec at_one = eval_bracket(A, pt({0.0, 1.0}));
    CHECK(at_one[0] == doctest::Approx(0.0));
    CHECK(at_one[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("smoothness violations name the letter") {
    auto smooth = VectorFieldExpr::parse({"x1", "x2"});
    auto rough = VectorFieldExpr::parse({"x1*x2", "x1"}, 0);  // declared C^0
    BracketAssignment A{FormalBracket::parse("[X1,X2]"), {smooth, rough}};
    try {
        eval_bracket(A, pt({1.0, 1.0}));
        CHECK(false);
    } catch (const SmoothnessError& e) {
        CHECK(e.letter == 2);
    }
}

TEST_CASE("antisymmetry is exact at sampled points") {
    auto h1 = VectorFieldExpr::parse({"x1^2-x2", "exp(x1/3)"});
    auto h2 = VectorFieldExpr::parse({"sin(x2)", "x1*x2"});
    BracketAssignment fwd{FormalBracket::parse("[X1,X2]"), {h1, h2}};
    BracketAssignment rev{FormalBracket::parse("[X1,X2]"), {h2, h1}};
    Sampler rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        Vec x = rng.gaussian(2);
        Vec sum = eval_bracket(fwd, x) + eval_bracket(rev, x);
        CHECK(sum.norm() <= 1e-14);
    }
}

TEST_CASE("jacobi identity for random polynomial fields") {
    Sampler rng(20250809);
    auto rand_poly_field = [&]() {
        auto coeff = [&]() { return Expr::constant(std::round(rng.uniform(-3, 3))); };
        // quadratic polynomial components keep third derivatives exact
        std::vector<Expr> comps;
        for (int i = 0; i < 2; ++i) {
            Expr x1 = Expr::variable(1), x2 = Expr::variable(2);
            comps.push_back(coeff() + coeff() * x1 + coeff() * x2 + coeff() * x1 * x2 +
                            coeff() * pow_int(x1, 2) + coeff() * pow_int(x2, 2));
        }
        return VectorFieldExpr(comps, 2);
    };
    int cases = 0;
    while (cases < 100) {
        auto h1 = rand_poly_field();
        auto h2 = rand_poly_field();
        auto h3 = rand_poly_field();
        BracketAssignment t1{FormalBracket::parse("[[X1,X2],X3]"), {h1, h2, h3}};
        BracketAssignment t2{FormalBracket::parse("[[X1,X2],X3]"), {h2, h3, h1}};
        BracketAssignment t3{FormalBracket::parse("[[X1,X2],X3]"), {h3, h1, h2}};
        Vec x = rng.gaussian(2);
        Vec total = eval_bracket(t1, x) + eval_bracket(t2, x) + eval_bracket(t3, x);
        CHECK(total.norm() <= 1e-9 * (1 + x.norm()));
        ++cases;
    }
}

TEST_CASE("symbolic bracket matches the finite-difference oracle") {
    auto h1 = VectorFieldExpr::parse({"x2^2", "cos(x1)"});
    auto h2 = VectorFieldExpr::parse({"x1*x2", "exp(x2/5)"});
    BracketAssignment A{FormalBracket::parse("[X1,X2]"), {h1, h2}};
    Sampler rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        Vec x = rng.gaussian(2);
        Vec sym = eval_bracket(A, x);
        Vec fd = fd_bracket(h1, h2, x);
        CHECK((sym - fd).norm() <= 1e-5 * (1 + sym.norm()));
    }
}

TEST_CASE("enumerate goh brackets") {
    auto g1 = VectorFieldExpr::parse({"1", "x2"});
    auto g2 = VectorFieldExpr::parse({"x1", "0"});

    CHECK(enumerate_goh_brackets({}, 3, 0).empty());

    auto only_g1 = enumerate_goh_brackets({g1}, 2, 0);
    REQUIRE(only_g1.size() == 1);
    CHECK(only_g1[0].bracket.to_string() == "[X1,X2]");
    CHECK(eval_bracket(only_g1[0], pt({0.5, 2.0})).norm() == 0.0);

    auto pairs = enumerate_goh_brackets({g1, g2}, 2, 0);
    CHECK(pairs.size() == 4);  // (g1,g1), (g1,g2), (g2,g1), (g2,g2)

    // the exhaustive count oracle: shapes(len) * m1^len for len = 2,3
    auto upto3 = enumerate_goh_brackets({g1, g2}, 3, 0);
    CHECK(upto3.size() == 4 + 2 * 8);

    // declared low smoothness filters assignments out
    auto rough = VectorFieldExpr::parse({"x1", "x2"}, 1);
    auto filtered = enumerate_goh_brackets({rough}, 3, 1);
    // length 2 needs C^{1+1}=C^2 > C^1: nothing admissible
    CHECK(filtered.empty());
}
