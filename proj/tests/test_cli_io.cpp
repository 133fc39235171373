// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

TEST_SUITE("cli_io") {
    TEST_CASE("placeholder") { CHECK(true); }
}
