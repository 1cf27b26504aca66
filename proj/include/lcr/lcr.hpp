#pragma once

#include "lcr/error.hpp"
#include "lcr/rng.hpp"
#include "lcr/csv.hpp"
#include "lcr/version.hpp"

#include "lcr/core/dataset.hpp"
#include "lcr/core/row_subset.hpp"
#include "lcr/core/svd.hpp"
#include "lcr/core/leverage.hpp"
#include "lcr/core/least_squares.hpp"

#include "lcr/influence/combinatorics.hpp"
#include "lcr/influence/single_row.hpp"
#include "lcr/influence/sum_sampler.hpp"
#include "lcr/influence/subset_influence.hpp"
#include "lcr/influence/rejection.hpp"
#include "lcr/influence/enumerate.hpp"

#include "lcr/sketch/fwht.hpp"
#include "lcr/sketch/operator.hpp"
#include "lcr/sketch/embedding.hpp"
#include "lcr/sketch/preconditioner.hpp"
#include "lcr/sketch/approx_leverage.hpp"

#include "lcr/kaczmarz/label_oracle.hpp"
#include "lcr/kaczmarz/kaczmarz.hpp"
