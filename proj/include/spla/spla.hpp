#ifndef SPLA_SPLA_HPP
#define SPLA_SPLA_HPP

#include "spla/error.hpp"
#include "spla/matrix.hpp"
#include "spla/linalg.hpp"
#include "spla/data.hpp"
#include "spla/loading.hpp"
#include "spla/blocks.hpp"
#include "spla/sparse_loadings.hpp"
#include "spla/variance.hpp"
#include "spla/evaluation.hpp"
#include "spla/pipeline.hpp"
#include "spla/simulate.hpp"
#include "spla/report.hpp"

#endif  // SPLA_SPLA_HPP
