#include "doctest.h"
#include "netcalc/rational.hpp"

using netcalc::Q;

TEST_CASE("rational parsing") {
    CHECK(Q::parse("3") == Q(3));
    CHECK(Q::parse("-3/4") == Q(-3, 4));
    CHECK(Q::parse("1.25") == Q(5, 4));
    CHECK(Q::parse("2e-3") == Q(1, 500));
    CHECK(Q::parse("inf").isInf());
    CHECK_THROWS_AS(Q::parse("abc"), netcalc::DomainError);
    CHECK_THROWS_AS(Q::parse("1/0"), netcalc::DomainError);
}

TEST_CASE("rational arithmetic with infinity") {
    Q inf = Q::infinity();
    CHECK((inf + Q(3)).isInf());
    CHECK(Q(5) < inf);
    CHECK(netcalc::min(inf, Q(2)) == Q(2));
    CHECK((Q(2) * inf).isInf());
    CHECK_THROWS_AS(inf - inf, netcalc::DomainError);
    CHECK(Q(7, 2).str() == "7/2");
    CHECK(Q(1, 3).decimal(4) == "0.3333");
    CHECK(netcalc::floor(Q(-1, 2)) == Q(-1));
    CHECK(netcalc::ceil(Q(1, 2)) == Q(1));
    CHECK(netcalc::lcm(Q(1, 2), Q(1, 3)) == Q(1));
    CHECK(netcalc::pos(Q(-3)) == Q(0));
}
