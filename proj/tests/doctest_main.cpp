#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// the umbrella header must stay self-contained
#include "seqspec/seqspec.hpp"
