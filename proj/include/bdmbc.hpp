#pragma once

#include "bdmbc/bagging.hpp"
#include "bdmbc/bench.hpp"
#include "bdmbc/cluster.hpp"
#include "bdmbc/csv.hpp"
#include "bdmbc/dataset.hpp"
#include "bdmbc/error.hpp"
#include "bdmbc/generators.hpp"
#include "bdmbc/graph.hpp"
#include "bdmbc/grid.hpp"
#include "bdmbc/io.hpp"
#include "bdmbc/knn.hpp"
#include "bdmbc/metrics.hpp"
#include "bdmbc/mixture.hpp"
#include "bdmbc/parallel.hpp"
#include "bdmbc/plls.hpp"
#include "bdmbc/random.hpp"
