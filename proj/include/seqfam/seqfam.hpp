#pragma once

#include "seqfam/exact.hpp"
#include "seqfam/families.hpp"
#include "seqfam/float_check.hpp"
#include "seqfam/identities.hpp"
#include "seqfam/roots_expr.hpp"
