#ifndef WICKLAB_WICKLAB_HPP
#define WICKLAB_WICKLAB_HPP

#include "acceptance.hpp"
#include "diagrams.hpp"
#include "error.hpp"
#include "expr.hpp"
#include "grid.hpp"
#include "hermite.hpp"
#include "moments.hpp"
#include "numbers.hpp"
#include "parallel.hpp"
#include "partitions.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "wick.hpp"

#endif  // WICKLAB_WICKLAB_HPP
