#include "catch2/catch_amalgamated.hpp"
