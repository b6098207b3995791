#pragma once

#include "seqspec/arveson.hpp"
#include "seqspec/asymptotics.hpp"
#include "seqspec/errors.hpp"
#include "seqspec/linalg.hpp"
#include "seqspec/matrix.hpp"
#include "seqspec/restriction.hpp"
#include "seqspec/sequence.hpp"
#include "seqspec/toeplitz.hpp"
