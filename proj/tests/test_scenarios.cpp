// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

TEST_SUITE("scenarios") {
    TEST_CASE("placeholder") { CHECK(true); }
}
