// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

TEST_SUITE("projection_stepper") {
    TEST_CASE("placeholder") { CHECK(true); }
}
