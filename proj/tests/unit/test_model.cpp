#include <doctest.h>

#include "prange/error.hpp"
#include "prange/least_squares.hpp"
#include "prange/model.hpp"
#include "support.hpp"

#include <cmath>

using namespace prange;

namespace {

ErrorCode load_error(const std::string& text) {
    try {
        load_system(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ParseError;
}

std::size_t count_dimensional_residuals(const ConstraintSystem& sys, const std::map<std::string, double>& fixed) {
    std::size_t n = 0;
    for (const auto& c : sys.constraints()) {
        if (is_dimensional(c.type) && fixed.count(c.parameter)) ++n;
    }
    return n;
}

} // namespace

TEST_CASE("triangle loads with six coordinates") {
    const ConstraintSystem sys = testing::load_model("triangle.json");
    CHECK(sys.slot_count() == 6);
    CHECK(sys.entities().size() == 3);
    CHECK(sys.parameters().size() == 3);
    std::size_t dim = 0;
    for (const auto& c : sys.constraints()) dim += is_dimensional(c.type);
    CHECK(dim == 3);
    CHECK(sys.singularity_terms().empty());
}

TEST_CASE("quadrangle loads with points and two lines") {
    const ConstraintSystem sys = testing::load_model("quadrangle.json");
    CHECK(sys.slot_count() == 4 * 2 + 2 * 3);
    CHECK(sys.parameters().size() == 4);
    CHECK(sys.singularity_terms().empty());
}

TEST_CASE("load errors") {
    CHECK(load_error(R"({"entities":[{"id":"P1","type":"point"}],
        "constraints":[{"type":"distance","between":["P1","P9"],"parameter":"d1"}],
        "parameters":[{"name":"d1","kind":"distance","value":1}]})") == ErrorCode::UnknownEntity);
    CHECK(load_error(R"({"entities":[{"id":"P1","type":"point"},{"id":"P1","type":"point"}]})") ==
          ErrorCode::DuplicateId);
    CHECK(load_error(R"({"entities":[{"id":"P1","type":"point"},{"id":"P2","type":"point"}],
        "constraints":[{"type":"distance","between":["P1"],"parameter":"d1"}],
        "parameters":[{"name":"d1","kind":"distance","value":1}]})") == ErrorCode::ArityMismatch);
    CHECK(load_error(R"({"entities":[{"id":"P1","type":"point"},{"id":"P2","type":"point"}],
        "constraints":[{"type":"distance","between":["P1","P2"],"parameter":"d7"}]})") ==
          ErrorCode::UnknownParameter);
    CHECK(load_error(R"({"entities":[{"id":"P1","type":"point"},{"id":"P2","type":"point"}],
        "constraints":[{"type":"algebraic","expression":"q^2 - 1"}]})") == ErrorCode::UnknownParameter);
    CHECK(load_error("{not json") == ErrorCode::ParseError);
    CHECK(load_error(R"({"entities":[{"id":"P1","type":"blob"}]})") == ErrorCode::ParseError);
    CHECK(load_error(R"({"entities":[],"parameters":[{"name":"d1","kind":"distance","value":-2}]})") ==
          ErrorCode::ParseError);
}

TEST_CASE("angles accept degrees") {
    const ConstraintSystem sys = testing::load_model("hexagon.json");
    CHECK(*sys.parameter("alpha1").value == doctest::Approx(M_PI / 3.0));
    CHECK(sys.parameter("alpha1").kind == ParamKind::Angle);
}

TEST_CASE("distance residual") {
    const ConstraintSystem sys = testing::load_model("triangle.json");
    const auto r = sys.residuals({{"d1", 5.0}});
    REQUIRE(r.size() == 1);
    // P1 = (0,0), P2 = (3,4)
    CHECK(eval(r[0], std::vector<double>{0, 0, 3, 4, 9, 9}) == doctest::Approx(0.0));
    CHECK(eval(r[0], std::vector<double>{0, 0, 6, 8, 9, 9}) == doctest::Approx(5.0));
}

TEST_CASE("perpendicular residual is a1 a2 + b1 b2") {
    const ConstraintSystem sys = load_system(R"({"entities":[{"id":"L1","type":"line"},{"id":"L2","type":"line"}],
        "constraints":[{"type":"perpendicular","between":["L1","L2"]}]})");
    const auto r = sys.residuals({});
    REQUIRE(r.size() == 3);  // two normalizations and the perpendicularity
    const std::vector<double> x{0.6, 0.8, 1.0, -0.8, 0.6, 2.0};
    for (const auto& e : r) CHECK(eval(e, x) == doctest::Approx(0.0).epsilon(1e-15));
    const std::vector<double> y{0.6, 0.8, 1.0, 0.6, 0.8, 2.0};
    CHECK(eval(r.back(), y) == doctest::Approx(1.0));
}

TEST_CASE("only fixed parameters contribute dimensional residuals") {
    const ConstraintSystem sys = testing::load_model("triangle.json");
    CHECK(sys.residuals({{"d1", 10.0}}).size() == 1);
    CHECK(sys.residuals({}).size() == 0);
    CHECK(sys.residuals({{"d1", 10.0}, {"d2", 20.0}, {"d3", 20.0}}).size() == 3);
}

TEST_CASE("residual count by construction") {
    for (const char* name : {"triangle.json", "quadrangle.json", "hexagon.json", "slider.json", "pythagoras.json"}) {
        const ConstraintSystem sys = testing::load_model(name);
        const auto fixed = sys.current_values();
        std::size_t expected = count_dimensional_residuals(sys, fixed);
        for (const auto& e : sys.entities()) {
            if (e.kind == EntityKind::Line) expected += 1 + e.through.size();
        }
        for (const auto& c : sys.constraints()) {
            if (c.type == ConstraintType::On || c.type == ConstraintType::Perpendicular ||
                c.type == ConstraintType::Parallel || c.type == ConstraintType::Algebraic) {
                expected += 1;
            } else if (c.type == ConstraintType::Coincident) {
                expected += 2;
            }
        }
        CHECK_MESSAGE(sys.residuals(fixed).size() == expected, name);
    }
}

TEST_CASE("3-4-5 triangle satisfies every residual") {
    const ConstraintSystem sys = load_system(R"({"entities":[{"id":"P1","type":"point"},{"id":"P2","type":"point"},
        {"id":"P3","type":"point"}],
        "constraints":[{"type":"distance","between":["P1","P2"],"parameter":"d1"},
                       {"type":"distance","between":["P2","P3"],"parameter":"d2"},
                       {"type":"distance","between":["P3","P1"],"parameter":"d3"}],
        "parameters":[{"name":"d1","kind":"distance","value":3},{"name":"d2","kind":"distance","value":4},
                      {"name":"d3","kind":"distance","value":5}]})");
    const std::vector<double> x{0, 0, 3, 0, 3, 4};
    for (const auto& r : sys.residuals(sys.current_values())) CHECK(std::abs(eval(r, x)) < 1e-9);
}

TEST_CASE("algebraic constraint substitutes parameter functions") {
    const ConstraintSystem sys = testing::load_model("pythagoras.json");
    auto fixed = sys.current_values();
    fixed.erase("d1");
    fixed.erase("d2");
    // with d1, d2 free the algebraic residual is |P1P2|^2 + |P2P3|^2 - 1
    const auto r = sys.residuals(fixed);
    std::size_t algebraic = 0;
    std::vector<double> x(sys.slot_count(), 0.0);
    const auto p2 = sys.entity("P2").slot;
    const auto p3 = sys.entity("P3").slot;
    x[p2] = 0.6;
    x[p3] = 0.6;
    x[p3 + 1] = 0.8;
    for (const auto& e : r) {
        bool touches_p3 = depends_on(e, p3) || depends_on(e, p3 + 1);
        bool touches_p1 = depends_on(e, sys.entity("P1").slot);
        if (touches_p3 && touches_p1 && depends_on(e, p2)) {
            ++algebraic;
            CHECK(eval(e, x) == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
    CHECK(algebraic == 1);
}

TEST_CASE("singularity term of a point-defined line") {
    const ConstraintSystem sys = testing::load_model("slider.json");
    const auto terms = sys.singularity_terms();
    REQUIRE(terms.size() == 1);
    std::vector<double> x(sys.slot_count(), 0.0);
    x[sys.entity("P2").slot] = 3.0;
    x[sys.entity("P2").slot + 1] = 4.0;
    CHECK(eval(terms[0], x) == doctest::Approx(25.0));
}

TEST_CASE("save and load round trip") {
    for (const char* name : {"triangle.json", "quadrangle.json", "hexagon.json", "slider.json", "pythagoras.json"}) {
        const ConstraintSystem a = testing::load_model(name);
        const ConstraintSystem b = load_system(save_system(a));
        CHECK_MESSAGE(same_system(a, b), name);
    }
}
