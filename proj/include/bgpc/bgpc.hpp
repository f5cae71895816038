#pragma once

#include "bgpc/certify.hpp"
#include "bgpc/combinatorics.hpp"
#include "bgpc/construct.hpp"
#include "bgpc/cxmat.hpp"
#include "bgpc/error.hpp"
#include "bgpc/experiment.hpp"
#include "bgpc/model.hpp"
#include "bgpc/recover.hpp"
#include "bgpc/rng.hpp"
