#pragma once

// Everything: core model, DA, domains, manipulation search, rule search,
// college admissions, JSON I/O and the verification suites.

#include "matchlab/core.hpp"
#include "matchlab/da.hpp"
#include "matchlab/domain.hpp"
#include "matchlab/fixtures.hpp"
#include "matchlab/io.hpp"
#include "matchlab/manipulation.hpp"
#include "matchlab/mto.hpp"
#include "matchlab/properties.hpp"
#include "matchlab/rule_search.hpp"
#include "matchlab/suites.hpp"
