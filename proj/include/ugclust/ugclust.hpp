#pragma once

#include "ugclust/common.hpp"
#include "ugclust/rng.hpp"
#include "ugclust/graph.hpp"
#include "ugclust/signature.hpp"
#include "ugclust/union_find.hpp"
#include "ugclust/exact.hpp"
#include "ugclust/sampling.hpp"
#include "ugclust/greedy.hpp"
#include "ugclust/report.hpp"
#include "ugclust/kmedian.hpp"
#include "ugclust/kcenter.hpp"
#include "ugclust/generate.hpp"
