#pragma once

#include "partscape/dataset.hpp"
#include "partscape/enumerate.hpp"
#include "partscape/error.hpp"
#include "partscape/grouping.hpp"
#include "partscape/kernel.hpp"
#include "partscape/matrix.hpp"
#include "partscape/mds.hpp"
#include "partscape/partition.hpp"
#include "partscape/pdist.hpp"
#include "partscape/pipeline.hpp"
#include "partscape/point_set.hpp"
#include "partscape/quality.hpp"
#include "partscape/report.hpp"
#include "partscape/rng.hpp"
#include "partscape/sampler.hpp"
#include "partscape/transport.hpp"
